"""Steenrod-module toolkit: Jokers, Dickson invariants, Ext charts over A(n)."""
