"""Pydantic schemas for configs, file headers and reports."""
