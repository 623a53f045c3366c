"""MemoVis: a 3D design review backend.

Anchors textual design comments to suggested camera viewpoints and composes
in-context reference images through three modifier pipelines, with all
neural models behind pluggable external-service adapters.
"""

__version__ = "0.1.0"
