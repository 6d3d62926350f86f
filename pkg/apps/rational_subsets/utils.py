"""
Utility functions for the BS(1,q) toolkit API.
"""

import logging
from rest_framework.views import exception_handler
from rest_framework.response import Response
from rest_framework import status

from .exceptions import (
    AlphabetMismatchError,
    BudgetExceeded,
    ContextMismatchError,
    InvalidArgumentError,
    NotAPathError,
    ParseError,
)

logger = logging.getLogger(__name__)


def custom_exception_handler(exc, context):
    """Custom exception handler for Django REST Framework."""
    response = exception_handler(exc, context)

    if response is not None:
        return response

    if isinstance(exc, (ParseError, InvalidArgumentError, NotAPathError)):
        return Response({'error': str(exc)}, status=status.HTTP_400_BAD_REQUEST)

    if isinstance(exc, (ContextMismatchError, AlphabetMismatchError)):
        return Response({'error': str(exc)}, status=status.HTTP_409_CONFLICT)

    if isinstance(exc, BudgetExceeded):
        return Response(
            {'error': str(exc), 'gcd': exc.gcd, 'bound': exc.bound},
            status=status.HTTP_422_UNPROCESSABLE_ENTITY
        )

    logger.exception(f"Unhandled exception: {exc}")
    return Response({'error': 'Internal server error'}, status=status.HTTP_500_INTERNAL_SERVER_ERROR)
