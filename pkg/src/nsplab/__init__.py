"""nsplab: PCF-family languages, nested sequential procedures and bar recursion."""

import sys

# Terms built during long reductions nest deeply (pending suc / rec frames),
# and the printers and substitution walk them recursively.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__version__ = "0.1.0"
