"""
Django management command exposing the toolkit CLI.

Usage:
    python manage.py bs pe --q 2 "a t a t"
    python manage.py bs compile apps/rational_subsets/fixtures/a_t_cycle.bs --thickness 3 --stats
    python manage.py bs member apps/rational_subsets/fixtures/a_t_cycle.bs "a t a t t^-1 t^-1" --thickness 3
"""

import argparse
import logging
import sys

from django.core.management.base import BaseCommand

from apps.rational_subsets.cli import cmd_dispatch

logger = logging.getLogger(__name__)


class _Stream:
    """Pass text through to a command OutputWrapper without extra newlines."""

    def __init__(self, wrapper):
        self.wrapper = wrapper

    def write(self, text: str):
        self.wrapper.write(text, ending='')


class Command(BaseCommand):
    help = 'Rational subsets of BS(1,q): encode, compile, decide, reduce, verify'

    def add_arguments(self, parser):
        parser.add_argument('argv', nargs=argparse.REMAINDER, help='Subcommand and its arguments')

    def handle(self, *args, **options):
        code = cmd_dispatch(options['argv'], _Stream(self.stdout), _Stream(self.stderr))
        logger.debug(f"bs {' '.join(options['argv'][:1])} exited with {code}")
        if code:
            sys.exit(code)
