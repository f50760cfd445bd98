"""Opcode numbering for compiled expression programs.

Kept in a dependency-free module so both kernel backends and the compiler
agree on the encoding.  The Cython backend mirrors these values; the
cross-backend tests pin them together.
"""

OP_CONST = 0   # push consts[arg]
OP_VAR = 1     # push x
OP_NEG = 2
OP_SQRT = 3
OP_EXP = 4
OP_LN = 5
OP_ABS = 6
OP_ADD = 7
OP_SUB = 8
OP_MUL = 9
OP_DIV = 10
OP_POW = 11    # exponent at consts[arg] (numerator / real), consts[arg+1] (denominator, 0 => real)

STACK_LIMIT = 64
