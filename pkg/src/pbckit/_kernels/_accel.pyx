# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled propagation lane.

Operators are packed into uint64 words (bit j of word j >> 6 is qubit j).
The opcode table matches _pure.py; instructions with fired[i] == 0 are
skipped, which covers measurements and unfired conditioned gates alike.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def propagate(
    cnp.int32_t[:, ::1] program,
    const unsigned char[::1] fired,
    Py_ssize_t upto,
    cnp.uint64_t[::1] xw,
    cnp.uint64_t[::1] zw,
    int phase,
):
    cdef Py_ssize_t i, wa, wb
    cdef int op, a, b
    cdef cnp.uint64_t abit, tbit, xa, za
    for i in range(upto - 1, -1, -1):
        if fired[i] == 0:
            continue
        op = program[i, 0]
        a = program[i, 1]
        wa = a >> 6
        abit = (<cnp.uint64_t> 1) << (a & 63)
        if op == 0:  # h
            xa = xw[wa] & abit
            za = zw[wa] & abit
            if xa and za:
                phase += 2
            elif xa or za:
                xw[wa] ^= abit
                zw[wa] ^= abit
        elif op == 1:  # s
            if xw[wa] & abit:
                zw[wa] ^= abit
                phase += 3
        elif op == 2:  # x
            if zw[wa] & abit:
                phase += 2
        elif op == 3:  # z
            if xw[wa] & abit:
                phase += 2
        elif op == 4:  # cx
            b = program[i, 2]
            wb = b >> 6
            tbit = (<cnp.uint64_t> 1) << (b & 63)
            if xw[wa] & abit:
                xw[wb] ^= tbit
            if zw[wb] & tbit:
                zw[wa] ^= abit
    return phase & 3
