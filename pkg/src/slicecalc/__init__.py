"""Exact computations with Mackey functors for cyclic p-groups."""
