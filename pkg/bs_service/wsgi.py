"""
WSGI config for the BS(1,q) toolkit service.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'bs_service.settings')

application = get_wsgi_application()
