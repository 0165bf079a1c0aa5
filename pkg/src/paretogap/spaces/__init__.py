"""Bundled configuration-space fixtures (text format, see paretogap.search)."""
