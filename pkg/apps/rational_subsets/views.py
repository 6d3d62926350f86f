"""
Django REST Framework views for the BS(1,q) toolkit.

API Endpoints:
- POST /api/bs/pe/         - Encode a generator word as a pe text
- POST /api/bs/mul/        - Multiply pe texts
- POST /api/bs/compile/    - Compile a BS automaton (cached)
- GET  /api/bs/compiled/   - List cached compile results
- POST /api/bs/member/     - Rational subset membership
"""

import logging
from typing import Optional, Tuple

from rest_framework.views import APIView
from rest_framework.response import Response

from .bs_automata import parse_bs_automaton
from .compile_engine import CompileEngine
from .decisions import fixed_subset_matcher
from .exceptions import BudgetExceeded
from .group_core import GroupContext
from .models import CompiledSet, CompileStatus
from .pe_regular import parse_pe_set
from .pointed_expansion import decode_text, encode_text
from .serializers import (
    CompiledSetSerializer,
    CompileRequestSerializer,
    EncodeRequestSerializer,
    MemberRequestSerializer,
    MultiplyRequestSerializer,
)

logger = logging.getLogger(__name__)


def compile_cached(source: str, thickness: Optional[int] = None) -> Tuple[CompiledSet, bool]:
    """Compiled set for source, reusing a stored successful result. Returns (record, cached)."""
    record = CompiledSet.lookup(source, thickness)
    if record is not None and record.status == CompileStatus.SUCCESS:
        logger.debug(f"Compile cache hit {record.source_hash[:12]}")
        return record, True

    automaton = parse_bs_automaton(source)
    try:
        result = CompileEngine(thickness=thickness).run(automaton)
    except BudgetExceeded as e:
        CompiledSet.upsert(source, automaton.ctx.q, thickness, error_message=str(e))
        raise
    record = CompiledSet.upsert(source, automaton.ctx.q, thickness, dump=result.pe_set.dump(), stats=result.stats)
    return record, False


class EncodeView(APIView):
    """Generator word to canonical pe."""

    def post(self, request):
        serializer = EncodeRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        ctx = GroupContext(serializer.validated_data['q'])
        element = ctx.eval_word(serializer.validated_data['word'])
        return Response({
            'pe': encode_text(ctx, element),
            'element': ctx.format(element),
        })


class MultiplyView(APIView):
    """Product of pe texts."""

    def post(self, request):
        serializer = MultiplyRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        ctx = GroupContext(serializer.validated_data['q'])
        element = ctx.product(decode_text(ctx, text) for text in serializer.validated_data['elements'])
        return Response({
            'pe': encode_text(ctx, element),
            'element': ctx.format(element),
        })


class CompileView(APIView):
    """Compile a BS automaton to its PE-set dump."""

    def post(self, request):
        serializer = CompileRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        record, cached = compile_cached(
            serializer.validated_data['automaton'],
            serializer.validated_data.get('thickness'),
        )
        return Response({
            'cached': cached,
            'result': CompiledSetSerializer(record).data
        })


class CompiledSetListView(APIView):
    """List cached compile results."""

    def get(self, request):
        records = CompiledSet.objects.all().order_by('-updated_at')
        return Response({
            'count': records.count(),
            'results': CompiledSetSerializer(records, many=True).data
        })


class MemberView(APIView):
    """Is the element of a generator word accepted by the automaton?"""

    def post(self, request):
        serializer = MemberRequestSerializer(data=request.data)
        serializer.is_valid(raise_exception=True)

        record, _ = compile_cached(
            serializer.validated_data['automaton'],
            serializer.validated_data.get('thickness'),
        )
        matcher = fixed_subset_matcher(parse_pe_set(record.dump))
        word = serializer.validated_data['word']
        return Response({
            'accepted': matcher.accepts(word),
            'element': matcher.ctx.format(matcher.ctx.eval_word(word)),
        })
