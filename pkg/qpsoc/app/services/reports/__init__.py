from .models import GAP_TOL, GraphSummary, ModelSummary, RunReport, TdSummary
from .storage import append_csv, render_json, render_text, write_text
