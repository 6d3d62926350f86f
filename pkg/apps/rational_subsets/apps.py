from django.apps import AppConfig


class RationalSubsetsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.rational_subsets'
    verbose_name = 'Rational Subsets of BS(1,q)'
