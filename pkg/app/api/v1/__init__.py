# This file makes 'v1' a Python package.