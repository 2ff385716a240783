"""
Regla de cuadratura de 14 puntos en el tetraedro de referencia.

Es exacta para polinomios de grado 5; los pesos suman 1/6, el volumen
del tetraedro de referencia.
"""

from itertools import permutations

import numpy as np


def _orbita(*baricentricas):
    return sorted(set(permutations(baricentricas)))


def _walkington14():
    a1, w1 = 0.3108859192633006, 0.018781320953002641
    a2, w2 = 0.09273525031089123, 0.012248840519393658
    a3, w3 = 0.045503704125649649, 0.0070910034628469110
    b3 = 0.5 - a3

    puntos, pesos = [], []
    for orbita, peso in (
        (_orbita(a1, a1, a1, 1.0 - 3.0 * a1), w1),
        (_orbita(a2, a2, a2, 1.0 - 3.0 * a2), w2),
        (_orbita(a3, a3, b3, b3), w3),
    ):
        puntos.extend(orbita)
        pesos.extend([peso] * len(orbita))
    return np.array(puntos), np.array(pesos)


# BARYCENTRIC[q] = (λ0, λ1, λ2, λ3) del punto q.
BARYCENTRIC, WEIGHTS = _walkington14()
DEGREE = 5
N_POINTS = len(WEIGHTS)
