"""Structured anisotropic triangulations of the unit square"""
from meshing.generator import Face, Mesh, MeshFamily, Triangle, build_mesh, face_geometry, generate_mesh
from meshing.quality import MeshQuality, mesh_quality
from meshing.export import write_mesh_text

__all__ = [
    'Face', 'Mesh', 'MeshFamily', 'Triangle', 'build_mesh', 'face_geometry',
    'generate_mesh', 'MeshQuality', 'mesh_quality', 'write_mesh_text',
]
