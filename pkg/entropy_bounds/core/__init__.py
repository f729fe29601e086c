"""Core Package - settings, exceptions and logging"""
