"""
Test suite for linfty-lab.
"""
