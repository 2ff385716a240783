import dataclasses
import math
import tempfile
import time
from pathlib import Path

import meshio
import numpy as np
from django.test import SimpleTestCase, tag
from scipy.sparse.linalg import eigsh, spsolve

from cell_mesh.extrusion import build_cell_mesh, extrude_to_tets
from cell_mesh.geometry import PRESETS, CellSpec
from cell_mesh.triangulation import Mesh2D
from channel_oracle.oracle import channel_flux
from core.exceptions import NonpositiveViscosity, PairingIncomplete, SolverBreakdown
from fem_stokes.assembly import GradientForm, assemble, load_vector
from fem_stokes.export import write_kkt, write_vtk
from fem_stokes.fields import deformation_norm_field, dissipation, gradient_energy
from fem_stokes.picard import PicardOptions, picard_solve
from fem_stokes.quadrature import BARYCENTRIC, WEIGHTS
from fem_stokes.solver import SaddleFactorization, solve_saddle
from fem_stokes.space import build_space
from rheology.laws import Carreau, Newtonian

E1 = np.array([1.0, 0.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])


def cubo_seis_tetraedros():
    puntos = np.array([(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)], dtype=float)
    return extrude_to_tets(Mesh2D(puntos, np.array([(0, 1, 2), (0, 2, 3)])), 1)


def espacio_canal(h=0.25, n_layers=4):
    return build_space(build_cell_mesh(CellSpec(None, h=h, n_layers=n_layers)))


class QuadratureTests(SimpleTestCase):
    def test_weights(self):
        self.assertEqual(len(WEIGHTS), 14)
        self.assertAlmostEqual(WEIGHTS.sum(), 1.0 / 6.0, places=15)
        np.testing.assert_allclose(BARYCENTRIC.sum(axis=1), 1.0, atol=1e-15)

    def test_exactness(self):
        lam = BARYCENTRIC
        self.assertAlmostEqual(WEIGHTS @ (lam[:, 0] ** 2 * lam[:, 1] ** 2), 1.0 / 1260.0, places=15)
        self.assertAlmostEqual(WEIGHTS @ (lam[:, 2] ** 4), 1.0 / 210.0, places=15)
        self.assertAlmostEqual(WEIGHTS @ (lam[:, 3] ** 5), 1.0 / 336.0, places=15)


class SpaceTests(SimpleTestCase):
    def test_six_tet_cube_counts(self):
        espacio = build_space(cubo_seis_tetraedros())
        self.assertEqual(espacio.n_nodes, 27)
        self.assertEqual(espacio.n_classes, 12)
        self.assertEqual(espacio.n_identified_velocity_dofs, 36)
        self.assertEqual(espacio.n_velocity_dofs, 12)
        self.assertEqual(espacio.n_pressure_dofs, 2)

    def test_round_trip(self):
        espacio = espacio_canal()
        u = np.random.default_rng(0).standard_normal(espacio.n_velocity_dofs)
        np.testing.assert_array_equal(espacio.restrict_velocity(espacio.expand_velocity(u)), u)

    def test_dirichlet_only_on_obstacle_top_bottom(self):
        espacio = build_space(build_cell_mesh(CellSpec(PRESETS['E1'], h=0.1, n_layers=4)))
        nodos = np.flatnonzero(espacio.class_dirichlet[espacio.node_class])
        x = espacio.node_coords[nodos]
        en_tapas = (x[:, 2] == 0.0) | (x[:, 2] == 1.0)
        en_obstaculo = np.hypot(x[:, 0], x[:, 1]) <= 0.1 + 1e-12
        self.assertTrue(np.all(en_tapas | en_obstaculo))
        self.assertTrue(np.any(en_obstaculo & ~en_tapas))
        self.assertTrue(np.any(x[:, 2] == 0.0) and np.any(x[:, 2] == 1.0))

    def test_deleted_pair(self):
        malla = build_cell_mesh(CellSpec(None, h=0.25, n_layers=4))
        pares = dict(malla.periodic_pairs)
        pares['x'] = pares['x'][1:]
        with self.assertRaises(PairingIncomplete):
            build_space(dataclasses.replace(malla, periodic_pairs=pares))


class AssemblyTests(SimpleTestCase):
    def setUp(self):
        self.espacio = espacio_canal()

    def test_symmetry(self):
        for forma in GradientForm:
            A = assemble(self.espacio, 1.0, forma, E1).A
            asimetria = abs(A - A.T).max()
            self.assertLessEqual(asimetria, 1e-12 * abs(A).max())

    def test_full_gradient_is_componentwise(self):
        A = assemble(self.espacio, 1.0, GradientForm.FULL_GRADIENT, E1).A.tocsr()
        for i in range(3):
            for j in range(3):
                if i != j:
                    self.assertEqual(abs(A[i::3, j::3]).sum(), 0.0)

    def test_positive_definite(self):
        A = assemble(self.espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1).A
        minimo = eigsh(A.tocsc(), k=1, sigma=0.0, which='LM', return_eigenvectors=False)[0]
        self.assertGreater(minimo, 0.0)

    def test_pressure_mean_row(self):
        sistema = assemble(self.espacio, 1.0, GradientForm.FULL_GRADIENT, E1)
        self.assertAlmostEqual(sistema.m.sum(), 1.0, places=12)

    def test_pressure_mass_matrix(self):
        sistema = assemble(self.espacio, 2.0, GradientForm.FULL_GRADIENT, E1)
        unos = np.ones(self.espacio.n_pressure_dofs)
        self.assertAlmostEqual(unos @ (sistema.M @ unos), 0.5, places=12)
        self.assertLessEqual(abs(sistema.M - sistema.M.T).max(), 1e-12 * abs(sistema.M).max())

    def test_with_viscosity_keeps_divergence_and_load(self):
        sistema = assemble(self.espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1)
        otro = sistema.with_viscosity(3.0)
        self.assertIs(otro.B, sistema.B)
        np.testing.assert_array_equal(otro.rhs, sistema.rhs)
        self.assertAlmostEqual(abs(otro.A - 3.0 * sistema.A).max(), 0.0, places=12)
        self.assertAlmostEqual(abs(3.0 * otro.M - sistema.M).max(), 0.0, places=14)

    def test_nonpositive_viscosity(self):
        with self.assertRaises(NonpositiveViscosity):
            assemble(self.espacio, -1.0, GradientForm.FULL_GRADIENT, E1)
        eta = np.ones_like(self.espacio.qp_weights)
        eta[3, 2] = np.nan
        with self.assertRaises(NonpositiveViscosity):
            assemble(self.espacio, eta, GradientForm.FULL_GRADIENT, E1)

    def test_zero_force(self):
        sistema = assemble(self.espacio, 1.0, GradientForm.FULL_GRADIENT, np.zeros(3))
        self.assertFalse(np.any(sistema.rhs))
        solucion = solve_saddle(sistema)
        self.assertFalse(np.any(solucion.velocity))

    def test_load_is_linear(self):
        np.testing.assert_allclose(
            load_vector(self.espacio, [2.0, -1.0, 0.5]),
            2.0 * load_vector(self.espacio, E1) - load_vector(self.espacio, [0, 1, 0]) + 0.5 * load_vector(self.espacio, E3),
            atol=1e-15,
        )


class SaddleSolveTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.espacio = espacio_canal()
        cls.sistema = assemble(cls.espacio, 1.0, GradientForm.FULL_GRADIENT, E1)
        cls.poiseuille = solve_saddle(cls.sistema, tol=1e-10)

    def test_poiseuille_midplane(self):
        u = self.poiseuille.nodal_velocity()
        medio = self.espacio.node_coords[:, 2] == 0.5
        np.testing.assert_allclose(u[medio, 0], 0.125, rtol=1e-2)
        np.testing.assert_allclose(u[:, 1:], 0.0, atol=1e-10)

    def test_poiseuille_flux(self):
        self.assertAlmostEqual(self.poiseuille.velocity_integral()[0], 1.0 / 12.0, delta=1e-9)

    def test_solver_contract(self):
        diag = self.poiseuille.diagnostics
        self.assertLessEqual(diag['residual'], 1e-10)
        self.assertLessEqual(diag['divergence'], 1e-8)
        self.assertLessEqual(abs(self.poiseuille.pressure_mean()), 1e-10)

    def test_hydrostatic(self):
        solucion = solve_saddle(assemble(self.espacio, 1.0, GradientForm.FULL_GRADIENT, E3))
        np.testing.assert_allclose(solucion.velocity, 0.0, atol=1e-10)
        z = self.espacio.mesh.vertices[:, 2]
        np.testing.assert_allclose(solucion.vertex_pressure(), z - 0.5, atol=1e-8)

    def test_factorization_reuse(self):
        fact = SaddleFactorization(self.sistema)
        a = fact.solve(load_vector(self.espacio, [0, 1, 0]))
        b = solve_saddle(assemble(self.espacio, 1.0, GradientForm.FULL_GRADIENT, [0, 1, 0]))
        np.testing.assert_allclose(a.velocity, b.velocity, atol=1e-12)

    def test_linear_energy_identity(self):
        energia = gradient_energy(self.espacio, self.poiseuille)
        trabajo = E1 @ self.poiseuille.velocity_integral()
        self.assertAlmostEqual(energia / trabajo, 1.0, places=8)

    def test_symmetric_form_energy_is_half(self):
        A_sym = assemble(self.espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1).A
        u = self.poiseuille.velocity
        self.assertAlmostEqual((u @ (A_sym @ u)) / (u @ (self.sistema.A @ u)), 0.5, places=6)

    def test_laplacian_form_factors_scalar_block(self):
        fact = SaddleFactorization(self.sistema)
        self.assertTrue(fact.velocity.componentwise)
        self.assertEqual(3 * fact.velocity.order, self.sistema.n_velocity)
        simetrica = SaddleFactorization(assemble(self.espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1))
        self.assertEqual(simetrica.velocity.order, self.sistema.n_velocity)

    def test_matches_bordered_system(self):
        x = spsolve(self.sistema.kkt_matrix(), self.sistema.kkt_rhs())
        nu = self.sistema.n_velocity
        np.testing.assert_allclose(self.poiseuille.velocity, x[:nu], atol=1e-10)
        np.testing.assert_allclose(self.poiseuille.pressure, x[nu:-1], atol=1e-8)

    def test_pressure_warm_start(self):
        fact = SaddleFactorization(self.sistema)
        otra = fact.solve(pressure=self.poiseuille.pressure)
        self.assertLessEqual(otra.diagnostics['schur_iterations'], self.poiseuille.diagnostics['schur_iterations'])
        np.testing.assert_allclose(otra.velocity, self.poiseuille.velocity, atol=1e-10)

    def test_breakdown_reports_history(self):
        with self.assertRaises(SolverBreakdown) as ctx:
            solve_saddle(self.sistema, tol=1e-300)
        self.assertGreater(len(ctx.exception.residual_history), 1)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_exports(self):
        with tempfile.TemporaryDirectory() as tmp:
            kkt = write_kkt(self.sistema, Path(tmp) / 'kkt.mtx')
            self.assertTrue(kkt.exists())
            self.assertTrue((Path(tmp) / 'kkt_rhs.mtx').exists())
            vtk = write_vtk(self.poiseuille, Path(tmp) / 'poiseuille.vtk')
            leida = meshio.read(vtk)
        self.assertEqual(leida.point_data['velocity'].shape, (self.espacio.mesh.n_vertices, 3))


class DeformationFieldTests(SimpleTestCase):
    def setUp(self):
        self.espacio = espacio_canal()

    def test_zero_field(self):
        d = deformation_norm_field(self.espacio, np.zeros(self.espacio.n_velocity_dofs))
        self.assertFalse(np.any(d))

    def test_linear_shear(self):
        nodal = self.espacio.interpolate(lambda x: np.column_stack([x[:, 2], 0 * x[:, 0], 0 * x[:, 0]]))
        d = deformation_norm_field(self.espacio, nodal)
        np.testing.assert_allclose(d, 1.0 / math.sqrt(2.0), atol=1e-12)

    def test_poiseuille_profile(self):
        solucion = solve_saddle(assemble(self.espacio, 1.0, GradientForm.FULL_GRADIENT, E1))
        d = deformation_norm_field(self.espacio, solucion)
        z = self.espacio.qp_coords[..., 2]
        np.testing.assert_allclose(d, np.abs(0.5 - z) / math.sqrt(2.0), atol=1e-8)


class PicardTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.espacio = espacio_canal(h=0.25, n_layers=8)

    def test_newtonian_single_iteration(self):
        solucion = picard_solve(self.espacio, Newtonian(1.0), E1)
        self.assertEqual(solucion.diagnostics['iterations'], 1)
        lineal = solve_saddle(assemble(self.espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1))
        np.testing.assert_allclose(solucion.velocity, lineal.velocity, atol=1e-12)

    def test_zero_force(self):
        solucion = picard_solve(self.espacio, Carreau(1.0, 1e-3, 1.0, 1.7), np.zeros(3))
        self.assertEqual(solucion.diagnostics['iterations'], 0)
        self.assertFalse(np.any(solucion.velocity))

    def test_carreau_matches_channel_oracle(self):
        ley = Carreau(1.0, 1e-3, 1.0, 1.7)
        solucion = picard_solve(self.espacio, ley, E1)
        flujo = solucion.velocity_integral()[0]
        referencia = channel_flux(ley, 1.0)
        self.assertLess(abs(flujo - referencia) / referencia, 0.02)

    def test_energy_identity_and_fixed_point(self):
        ley = Carreau(1.0, 1e-3, 10.0, 1.7)
        f = np.array([2.0, 0.0, 0.0])
        opciones = PicardOptions(tol_rel=1e-10)
        solucion = picard_solve(self.espacio, ley, f, opciones)
        eta = ley.evaluate(deformation_norm_field(self.espacio, solucion))
        trabajo = f @ solucion.velocity_integral()
        self.assertLess(abs(dissipation(self.espacio, solucion, eta) - trabajo) / trabajo, 1e-6)

        otra = solve_saddle(assemble(self.espacio, eta, GradientForm.SYMMETRIC_GRADIENT, f))
        cambio = np.linalg.norm(otra.velocity - solucion.velocity) / np.linalg.norm(solucion.velocity)
        self.assertLessEqual(cambio, 10 * opciones.tol_rel)

    def test_relaxed_velocity_and_pressure_are_paired(self):
        espacio = build_space(build_cell_mesh(CellSpec(PRESETS['E1'], h=0.2, n_layers=4)))
        ley = Carreau(1.0, 1e-3, 10.0, 1.7)
        solucion = picard_solve(espacio, ley, E1, PicardOptions(tol_rel=0.99, relax=0.5))
        self.assertEqual(solucion.diagnostics['iterations'], 1)

        base = assemble(espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1)
        cero = solve_saddle(base)
        eta = ley.evaluate(deformation_norm_field(espacio, cero.velocity))
        uno = solve_saddle(base.with_viscosity(eta))
        escala_u = np.abs(uno.velocity).max()
        escala_p = np.abs(uno.pressure).max()
        np.testing.assert_allclose(solucion.velocity, 0.5 * (cero.velocity + uno.velocity), atol=1e-8 * escala_u)
        np.testing.assert_allclose(solucion.pressure, 0.5 * (cero.pressure + uno.pressure), atol=1e-7 * escala_p)
        self.assertGreater(np.abs(uno.pressure - cero.pressure).max(), 1e-5 * escala_p)

    def test_history_is_recorded(self):
        solucion = picard_solve(self.espacio, Carreau(1.0, 1e-3, 10.0, 2.6), E1)
        historia = solucion.diagnostics['history']
        self.assertEqual(len(historia), solucion.diagnostics['iterations'])
        self.assertLessEqual(historia[-1], 1e-8)


@tag('lento')
class DefaultResolutionTests(SimpleTestCase):
    def test_poiseuille_midplane_default_mesh(self):
        espacio = build_space(build_cell_mesh(CellSpec(None)))
        solucion = solve_saddle(assemble(espacio, 1.0, GradientForm.FULL_GRADIENT, E1))
        medio = espacio.node_coords[:, 2] == 0.5
        np.testing.assert_allclose(solucion.nodal_velocity()[medio, 0], 0.125, rtol=1e-2)

    def test_symmetric_solve_on_e1_within_budget(self):
        espacio = build_space(build_cell_mesh(CellSpec(PRESETS['E1'])))
        inicio = time.perf_counter()
        solucion = solve_saddle(assemble(espacio, 1.0, GradientForm.SYMMETRIC_GRADIENT, E1))
        self.assertLess(time.perf_counter() - inicio, 120.0)
        self.assertLessEqual(solucion.diagnostics['residual'], 1e-10)

    def test_carreau_dilatant_on_e1(self):
        espacio = build_space(build_cell_mesh(CellSpec(PRESETS['E1'])))
        solucion = picard_solve(espacio, Carreau(1.0, 1e-3, 100.0, 2.6), E1)
        self.assertTrue(solucion.diagnostics['converged'])
        self.assertLessEqual(solucion.diagnostics['history'][-1], 1e-8)

    def test_refinement_reduces_channel_error(self):
        ley = Carreau(1.0, 1e-3, 1.0, 1.7)
        referencia = channel_flux(ley, 1.0)
        errores = []
        for h, capas in ((0.5, 4), (0.25, 8)):
            espacio = espacio_canal(h=h, n_layers=capas)
            flujo = picard_solve(espacio, ley, E1).velocity_integral()[0]
            errores.append(abs(flujo - referencia))
        self.assertLess(errores[1], errores[0])
