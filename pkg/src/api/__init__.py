"""HTTP access to tilesets"""
