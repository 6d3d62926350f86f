"""
Django REST Framework serializers for the BS(1,q) toolkit.
"""

from django.conf import settings
from rest_framework import serializers

from .models import CompiledSet


class CompiledSetSerializer(serializers.ModelSerializer):
    """Serializer for cached compile results."""

    class Meta:
        model = CompiledSet
        fields = [
            'id', 'source_hash', 'q', 'thickness', 'status',
            'dump', 'stats', 'error_message', 'created_at', 'updated_at'
        ]


class EncodeRequestSerializer(serializers.Serializer):
    """Generator word to encode."""
    q = serializers.IntegerField(required=False, min_value=2, default=settings.BS_DEFAULT_Q)
    word = serializers.CharField(required=True, allow_blank=True, trim_whitespace=False)


class MultiplyRequestSerializer(serializers.Serializer):
    """Elements as pe texts, multiplied left to right."""
    q = serializers.IntegerField(required=False, min_value=2, default=settings.BS_DEFAULT_Q)
    elements = serializers.ListField(child=serializers.CharField(), allow_empty=False)


class CompileRequestSerializer(serializers.Serializer):
    """BS automaton text in the file format."""
    automaton = serializers.CharField(required=True)
    thickness = serializers.IntegerField(required=False, min_value=1, allow_null=True, default=None)


class MemberRequestSerializer(CompileRequestSerializer):
    """Automaton plus the generator word to test."""
    word = serializers.CharField(required=True, allow_blank=True, trim_whitespace=False)
