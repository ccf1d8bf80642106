"""Transformer-based embedding exporter and HTTP service.

Writes "editvec-emb/v1" interchange files and serves the POST /embed
contract so scoring pipelines can use a real encoder as a drop-in backend.
"""

from .export import ExportJob, Encoder, export
from .service import create_app, serve

__version__ = "0.1.0"

__all__ = ["ExportJob", "Encoder", "export", "create_app", "serve"]
