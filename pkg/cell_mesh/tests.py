import math
import tempfile
from pathlib import Path

import meshio
import numpy as np
from django.test import SimpleTestCase

from core.exceptions import ClearanceViolation, InvalidShape, MeshFailure, PeriodicPairingError
from cell_mesh.export import write_msh
from cell_mesh.extrusion import FacetTag, build_cell_mesh, extrude_to_tets
from cell_mesh.geometry import PRESETS, CellSpec, InclusionShape, Polygon2D, build_inclusion_polygon, preset
from cell_mesh.triangulation import Mesh2D, check_triangle_areas, side_distribution, triangulate_cross_section


def cuadrado_dos_triangulos(extra=None):
    puntos = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)]
    triangulos = [(0, 1, 2), (0, 2, 3)]
    if extra is not None:
        puntos.append(extra)
        triangulos = [(0, 1, 4), (1, 2, 4), (2, 3, 4)]
    return Mesh2D(np.array(puntos, dtype=float), np.array(triangulos))


class InclusionShapeTests(SimpleTestCase):
    def test_invalid_parameters(self):
        with self.assertRaises(InvalidShape):
            InclusionShape.disk(0.0)
        with self.assertRaises(InvalidShape):
            InclusionShape.ellipse(0.1, 0.3)
        with self.assertRaises(InvalidShape):
            CellSpec(PRESETS['E1'], n_seg=8)
        with self.assertRaises(InvalidShape):
            CellSpec(PRESETS['E1'], n_layers=2)
        with self.assertRaises(InvalidShape):
            preset('E9')

    def test_presets(self):
        self.assertEqual(preset('e4').radius, 0.3)
        self.assertIsNone(preset('NONE'))
        self.assertAlmostEqual(PRESETS['E3'].angle, math.pi / 2)

    def test_cell_spec_defaults_are_hashable(self):
        spec = CellSpec(PRESETS['E1'])
        self.assertEqual((spec.n_seg, spec.h, spec.n_layers), (64, 0.08, 8))
        self.assertEqual(hash(spec), hash(CellSpec(InclusionShape.disk(0.1))))


class InclusionPolygonTests(SimpleTestCase):
    def test_disk_area_is_inscribed_polygon_area(self):
        poligono = build_inclusion_polygon(InclusionShape.disk(0.1), 64)
        esperado = 32 * 0.01 * math.sin(2 * math.pi / 64)
        self.assertAlmostEqual(poligono.area, esperado, places=14)
        self.assertLess(abs(poligono.area - math.pi * 0.01) / (math.pi * 0.01), 0.002)
        self.assertTrue(poligono.is_ccw)
        self.assertTrue(poligono.is_simple())

    def test_vertices_lie_on_the_curve(self):
        forma = InclusionShape.ellipse(0.3, 0.1, angle=0.7)
        poligono = build_inclusion_polygon(forma, 48)
        c, s = math.cos(0.7), math.sin(0.7)
        x, y = poligono.vertices[:, 0], poligono.vertices[:, 1]
        u, v = c * x + s * y, -s * x + c * y
        np.testing.assert_allclose((u / 0.3) ** 2 + (v / 0.1) ** 2, 1.0, atol=1e-13)

    def test_ellipse_rhombus(self):
        poligono = build_inclusion_polygon(InclusionShape.ellipse(0.3, 0.1), 4)
        np.testing.assert_allclose(
            poligono.vertices, [[0.3, 0.0], [0.0, 0.1], [-0.3, 0.0], [0.0, -0.1]], atol=1e-15,
        )

    def test_clearance(self):
        with self.assertRaises(ClearanceViolation) as ctx:
            build_inclusion_polygon(InclusionShape.disk(0.5), 32)
        self.assertEqual(ctx.exception.exit_code, 2)
        with self.assertRaises(ClearanceViolation):
            build_inclusion_polygon(InclusionShape.disk(0.46), 64)
        build_inclusion_polygon(InclusionShape.disk(0.44), 64)

    def test_self_intersecting_polygon_is_not_simple(self):
        lazo = Polygon2D([(-0.2, -0.2), (0.2, 0.2), (0.2, -0.2), (-0.2, 0.2)])
        self.assertFalse(lazo.is_simple())


class TriangulationTests(SimpleTestCase):
    def test_full_square(self):
        malla = triangulate_cross_section(None, 0.25)
        self.assertAlmostEqual(malla.area, 1.0, delta=1e-12)
        self.assertTrue(np.all(malla.triangle_areas() > 0))

    def test_disk_complement_area(self):
        poligono = build_inclusion_polygon(InclusionShape.disk(0.3), 64)
        malla = triangulate_cross_section(poligono, 0.1)
        self.assertAlmostEqual(malla.area, 1.0 - poligono.area, delta=1e-10)
        self.assertAlmostEqual(malla.area, 0.7179, delta=1e-3)

    def test_lateral_sides_share_distribution(self):
        malla = triangulate_cross_section(build_inclusion_polygon(PRESETS['E2'], 64), 0.08)
        t = side_distribution(0.08)
        for eje in (0, 1):
            for lado in (-0.5, 0.5):
                sobre = np.sort(malla.points[malla.points[:, eje] == lado][:, 1 - eje])
                np.testing.assert_array_equal(sobre, t)

    def test_self_intersecting_polygon(self):
        lazo = Polygon2D([(-0.2, -0.2), (0.2, 0.2), (0.2, -0.2), (-0.2, 0.2)])
        with self.assertRaises(MeshFailure):
            triangulate_cross_section(lazo, 0.1)

    def test_inverted_triangle_is_rejected(self):
        malla = cuadrado_dos_triangulos()
        areas = malla.triangle_areas()
        areas[1] = -areas[1]
        with self.assertRaises(MeshFailure):
            check_triangle_areas(areas, 0.5)

    def test_degenerate_triangle_is_rejected(self):
        with self.assertRaises(MeshFailure):
            check_triangle_areas(np.array([0.25, 0.0]), 0.5)


class ExtrusionTests(SimpleTestCase):
    def test_two_triangle_square(self):
        malla = extrude_to_tets(cuadrado_dos_triangulos(), 1)
        self.assertEqual(malla.n_tets, 6)
        self.assertEqual(malla.n_vertices, 8)
        self.assertAlmostEqual(malla.volume, 1.0, delta=1e-12)
        self.assertTrue(np.all(malla.tet_volumes() > 0))

    def test_mismatched_lateral_distribution(self):
        with self.assertRaises(PeriodicPairingError):
            extrude_to_tets(cuadrado_dos_triangulos(extra=(-0.5, 0.1)), 2)

    def test_vertex_count_and_tags(self):
        poligono = build_inclusion_polygon(PRESETS['E4'], 32)
        seccion = triangulate_cross_section(poligono, 0.1)
        malla = extrude_to_tets(seccion, 4)
        self.assertEqual(malla.n_vertices, 5 * seccion.n_points)
        self.assertNotIn(FacetTag.INTERIOR, set(malla.facet_tags.tolist()))
        self.assertAlmostEqual(malla.tag_area(FacetTag.BOTTOM), 1.0 - poligono.area, delta=1e-12)
        self.assertAlmostEqual(malla.tag_area(FacetTag.TOP), 1.0 - poligono.area, delta=1e-12)
        for tag in (FacetTag.X_LO, FacetTag.X_HI, FacetTag.Y_LO, FacetTag.Y_HI):
            self.assertAlmostEqual(malla.tag_area(tag), 1.0, delta=1e-12)
        self.assertAlmostEqual(malla.obstacle_area, poligono.perimeter, delta=1e-12)

    def test_periodic_pairs_are_exact_translations(self):
        malla = build_cell_mesh(CellSpec(PRESETS['E2'], h=0.1, n_layers=4))
        for eje, nombre in ((0, 'x'), (1, 'y')):
            pares = malla.periodic_pairs[nombre]
            salto = malla.vertices[pares[:, 1]] - malla.vertices[pares[:, 0]]
            esperado = np.zeros(3)
            esperado[eje] = 1.0
            np.testing.assert_array_equal(salto, np.tile(esperado, (len(pares), 1)))
            self.assertEqual(len(np.unique(pares[:, 1])), len(pares))

    def test_paired_lateral_faces_have_matching_diagonals(self):
        malla = build_cell_mesh(CellSpec(PRESETS['E1'], h=0.1, n_layers=4))
        pareja = dict(map(tuple, malla.periodic_pairs['x']))
        bajas = {tuple(sorted(pareja[v] for v in cara)) for cara in malla.facets_with(FacetTag.X_LO)}
        altas = {tuple(sorted(cara)) for cara in malla.facets_with(FacetTag.X_HI)}
        self.assertEqual(bajas, altas)

    def test_default_e1_mesh(self):
        spec = CellSpec(PRESETS['E1'])
        malla = build_cell_mesh(spec)
        poligono = build_inclusion_polygon(PRESETS['E1'], 64)
        self.assertGreaterEqual(malla.n_tets, 5000)
        self.assertLessEqual(malla.n_tets, 12000)
        self.assertAlmostEqual(malla.volume, 1.0 - poligono.area, delta=1e-10)
        self.assertIs(build_cell_mesh(CellSpec(InclusionShape.disk(0.1))), malla)

    def test_refinement_factor(self):
        grueso = build_cell_mesh(CellSpec(None, h=0.2, n_layers=4))
        fino = build_cell_mesh(CellSpec(None, h=0.1, n_layers=4))
        factor = fino.n_tets / grueso.n_tets
        self.assertGreaterEqual(factor, 3.0)
        self.assertLessEqual(factor, 6.0)

    def test_obstacle_area_isotropy(self):
        e2 = build_cell_mesh(CellSpec(PRESETS['E2'], h=0.1, n_layers=4))
        e3 = build_cell_mesh(CellSpec(PRESETS['E3'], h=0.1, n_layers=4))
        self.assertAlmostEqual(e2.obstacle_area, e3.obstacle_area, delta=1e-8)

    def test_quality_report(self):
        malla = build_cell_mesh(CellSpec(PRESETS['E4'], h=0.1, n_layers=4))
        reporte = malla.quality_report()
        self.assertEqual(reporte['n_tets'], malla.n_tets)
        self.assertGreater(reporte['min_tet_volume'], 0.0)
        self.assertLessEqual(reporte['min_edge'], reporte['max_edge'])
        self.assertGreater(reporte['facet_counts']['INTERIOR'], 0)
        self.assertEqual(sum(reporte['facet_counts'][t.name] for t in FacetTag if t != FacetTag.INTERIOR),
                         len(malla.facets))


class MshExportTests(SimpleTestCase):
    def test_write_gmsh22(self):
        malla = build_cell_mesh(CellSpec(PRESETS['E4'], h=0.2, n_layers=4))
        with tempfile.TemporaryDirectory() as tmp:
            ruta = write_msh(malla, Path(tmp) / 'celda.msh')
            self.assertTrue(ruta.read_text().startswith("$MeshFormat\n2.2"))
            leida = meshio.read(ruta)
        self.assertEqual(len(leida.points), malla.n_vertices)
        self.assertEqual(len(leida.cells_dict['tetra']), malla.n_tets)
        self.assertEqual(len(leida.cells_dict['triangle']), len(malla.facets))
