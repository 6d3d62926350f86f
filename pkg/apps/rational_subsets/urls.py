"""
URL configuration for the BS(1,q) toolkit API.
"""

from django.urls import path
from .views import (
    EncodeView,
    MultiplyView,
    CompileView,
    CompiledSetListView,
    MemberView,
)

urlpatterns = [
    path('pe/', EncodeView.as_view(), name='pe'),
    path('mul/', MultiplyView.as_view(), name='mul'),
    path('compile/', CompileView.as_view(), name='compile'),
    path('compiled/', CompiledSetListView.as_view(), name='compiled'),
    path('member/', MemberView.as_view(), name='member'),
]
