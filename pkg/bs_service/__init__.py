"""
BS(1,q) Rational Subset Toolkit - Django Project
"""
