from django.urls import path

from .views import OutageRunDetailView, OutageRunExportView, OutageRunListView

app_name = 'outage'

urlpatterns = [
    path('runs/', OutageRunListView.as_view(), name='run_list'),
    path('runs/<uuid:pk>/', OutageRunDetailView.as_view(), name='run_detail'),
    path('runs/<uuid:pk>/export/', OutageRunExportView.as_view(), name='run_export'),
]
