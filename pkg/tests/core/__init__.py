"""Tests for settings, logging and the error hierarchy"""
