"""
URL configuration for the BS(1,q) toolkit service.
"""

from django.urls import path, include

urlpatterns = [
    # Element and PE-set API
    path('api/bs/', include('apps.rational_subsets.urls')),
]
