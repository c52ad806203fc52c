"""cwkit: clique-width decompositions and certified reductions.

A toolkit for hereditary graph classes: recognising forbidden-pattern
classes, computing canonical and k-partite total decompositions, emitting
clique-width expressions with certified width bounds, replaying reduction
certificates, and solving colouring by dynamic programming on expressions.
"""

__version__ = "0.1.0"
