"""Why collocation uses Legendre-Gauss-Lobatto nodes.

Interpolating 1/(16x**2 + 1) on equally spaced points diverges near the ends
as the order grows; on LGL nodes the error shrinks.
"""

from trapcool.lgl import lgl_nodes, runge_demo

print("  N   uniform error   LGL error      ratio")
for N in (4, 8, 12, 16, 20, 24):
    row = runge_demo(N)
    print(f"{N:3d}   {row.error_uniform:13.6g}   {row.error_lgl:11.4g}   {row.ratio:9.1f}")

nodes = lgl_nodes(16)
print("\nLGL nodes for N=16 cluster at the ends:")
print("  " + " ".join(f"{x:+.3f}" for x in nodes))
print(f"  first gap {nodes[1] - nodes[0]:.4f} vs uniform gap {2 / 16:.4f}")
