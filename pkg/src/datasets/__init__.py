"""Tileset manifests, dataset building and ingestion"""
