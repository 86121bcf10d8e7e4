# This file makes 'domain' a Python package.