"""
Django models for the BS(1,q) toolkit.

Design Decision: Cache compiled sets by source hash
- Compiling is the only expensive operation, and its result is a canonical
  dump, so storing the dump text is enough to reuse it
- The key covers the automaton text and the thickness override
- Budget failures are recorded too, with the gcd and bound that tripped them
"""

import hashlib
from typing import Any, Dict, Optional

from django.db import models
from django.db.models import JSONField


class CompileStatus(models.TextChoices):
    """Outcome of a compile request."""
    SUCCESS = 'success', 'Success'
    BUDGET_EXCEEDED = 'budget_exceeded', 'Budget Exceeded'


class CompiledSet(models.Model):
    """
    PE-set dump of a compiled BS automaton.

    Dumps are canonical, so equal sources always map to byte-equal dumps.
    """

    source_hash = models.CharField(
        max_length=64,
        unique=True,
        db_index=True,
        help_text='sha256 of the automaton text and thickness override'
    )
    source = models.TextField(
        help_text='BS automaton text as submitted'
    )
    q = models.PositiveIntegerField(
        help_text='Base of BS(1,q)'
    )
    thickness = models.PositiveIntegerField(
        null=True,
        blank=True,
        help_text='Thickness override; empty means the default bound'
    )

    status = models.CharField(
        max_length=20,
        choices=CompileStatus.choices,
        default=CompileStatus.SUCCESS,
        help_text='Outcome of the last compile'
    )
    dump = models.TextField(
        null=True,
        blank=True,
        help_text='PE-set dump (pe q=N header and minimal DFA)'
    )
    stats = JSONField(
        default=dict,
        help_text='Per-stage statistics of the compile pipeline'
    )
    error_message = models.TextField(
        null=True,
        blank=True,
        help_text='Budget error, if any'
    )

    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        db_table = 'compiled_sets'
        verbose_name = 'Compiled Set'
        verbose_name_plural = 'Compiled Sets'

    def __str__(self):
        return f"CompiledSet q={self.q} {self.source_hash[:12]} ({self.status})"

    @staticmethod
    def source_key(source: str, thickness: Optional[int] = None) -> str:
        text = source.strip() + f"\n#thickness={thickness if thickness is not None else ''}"
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    @classmethod
    def lookup(cls, source: str, thickness: Optional[int] = None) -> Optional['CompiledSet']:
        return cls.objects.filter(source_hash=cls.source_key(source, thickness)).first()

    @classmethod
    def upsert(
        cls,
        source: str,
        q: int,
        thickness: Optional[int] = None,
        dump: Optional[str] = None,
        stats: Optional[Dict[str, Any]] = None,
        error_message: Optional[str] = None,
    ) -> 'CompiledSet':
        """
        Insert or update the cached result for a source.

        A missing dump records a budget failure.
        """
        compiled, _ = cls.objects.update_or_create(
            source_hash=cls.source_key(source, thickness),
            defaults={
                'source': source,
                'q': q,
                'thickness': thickness,
                'status': CompileStatus.SUCCESS if dump is not None else CompileStatus.BUDGET_EXCEEDED,
                'dump': dump,
                'stats': stats or {},
                'error_message': error_message,
            }
        )
        return compiled
