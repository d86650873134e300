"""
MCSP Toolkit Configuration
==========================
Edit this file to tune the solvers, the generator and the renderer.
All configuration values are centralized here for easy modification.
"""

# ============== SOLVER SETTINGS ==============
# Maximum number of branch states one fpt run may create.
# The worst case of the branching algorithm is astronomically large;
# a run that hits this limit exits with a resource error (exit code 2).
DEFAULT_BRANCH_BUDGET = 10_000_000

# Environment variable that overrides DEFAULT_BRANCH_BUDGET
BRANCH_BUDGET_ENV = "MCSP_BRANCH_BUDGET"

# Engine used when --engine is not given
DEFAULT_ENGINE = "fpt"              # fpt, oracle or greedy

# split branches exhaustively over small-shift alignments up to this count,
# and switches to the three-way break-marker branch above it
MAX_SMALL_SHIFT_ALIGNMENTS = 6

# ============== ORACLE SETTINGS ==============
# The brute-force oracle is exponential in n. Without a size bound it accepts
# strings up to this length; with --k it accepts any search over at most as
# many x-partitions as that (2 ** (ORACLE_MAX_N - 1)).
ORACLE_MAX_N = 16

# ============== GENERATOR SETTINGS ==============
# Bit generator behind `mcsp gen` (numpy.random.PCG64, 128-bit state,
# seeded from a 64-bit integer). Same seed, same instance, on any platform.
RNG_NAME = "PCG64"
DEFAULT_SIGMA = 3                   # Alphabet size for generated instances

# Symbols used when writing generated instances
GENERATOR_SYMBOLS = "abcdefghijklmnopqrstuvwxyz"

# ============== RENDERING SETTINGS ==============
RENDER_CELL = 22                    # Pixel width of one marker cell
RENDER_ROW_HEIGHT = 28              # Pixel height of a string row
RENDER_GAP = 70                     # Vertical gap between the x and y rows
RENDER_MARGIN = 16                  # Border around the drawing
RENDER_BACKGROUND = (255, 255, 255)
RENDER_INK = (20, 20, 20)

# Block fill colours, cycled when a partition has more blocks
RENDER_PALETTE = [
    (255, 179, 186),
    (186, 225, 255),
    (186, 255, 201),
    (255, 255, 186),
    (224, 187, 228),
    (255, 223, 186),
    (200, 200, 200),
    (170, 240, 240),
]

# Constraint renderings
RENDER_SOLID = (120, 170, 220)      # Solid pieces
RENDER_FRAGILE = (245, 245, 245)    # Fragile pieces
RENDER_FRAME = (220, 60, 60)        # Frame outlines

# `solve --debug --dump-dir DIR` renders at most this many dead-end constraints
DEAD_END_DUMP_LIMIT = 25

# ============== LOGGING ==============
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
