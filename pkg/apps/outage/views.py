from django.http import HttpResponse
from django.shortcuts import get_object_or_404
from drf_spectacular.utils import OpenApiParameter, OpenApiResponse, extend_schema
from rest_framework import generics, views
from rest_framework.permissions import IsAuthenticated

from .models import OutageRun
from .runner import ResultRow, emit_csv
from .serializers import OutageRunDetailSerializer, OutageRunSerializer


@extend_schema(
    summary="List outage runs",
    description="Stored runs, newest first. Filter with ?mode= and ?sweep_param=.",
    parameters=[
        OpenApiParameter('mode', type=str, required=False, description='analytic, montecarlo or both'),
        OpenApiParameter('sweep_param', type=str, required=False, description='T, p_m, R1, K or lambda1'),
    ],
    responses={200: OutageRunSerializer(many=True)},
    tags=["Outage"]
)
class OutageRunListView(generics.ListAPIView):
    """List stored runs"""

    queryset = OutageRun.objects.all()
    serializer_class = OutageRunSerializer
    permission_classes = [IsAuthenticated]
    filterset_fields = ['mode', 'sweep_param']
    ordering_fields = ['created_at']


@extend_schema(
    summary="Outage run detail",
    description="Configuration, assumption metadata and result rows of one run.",
    responses={200: OutageRunDetailSerializer},
    tags=["Outage"]
)
class OutageRunDetailView(generics.RetrieveAPIView):
    queryset = OutageRun.objects.prefetch_related('results')
    serializer_class = OutageRunDetailSerializer
    permission_classes = [IsAuthenticated]


@extend_schema(
    summary="Export outage run",
    description="Result table of one run in the command-line CSV format.",
    responses={200: OpenApiResponse(description='CSV file stream')},
    tags=["Outage"]
)
class OutageRunExportView(views.APIView):
    """Export a run's rows to CSV"""

    permission_classes = [IsAuthenticated]

    def get(self, request, pk):
        run = get_object_or_404(OutageRun, pk=pk)

        response = HttpResponse(content_type='text/csv')
        response['Content-Disposition'] = f'attachment; filename="outage_{run.id}.csv"'

        rows = [
            ResultRow(
                sweep_param=run.sweep_param,
                sweep_value=result.sweep_value,
                p_out_analytic=result.p_out_analytic,
                p_out_mc=result.p_out_mc,
                mc_ci95=result.mc_ci95,
                runtime_ms=result.runtime_ms,
            )
            for result in run.results.all()
        ]
        emit_csv(rows, response)
        return response
