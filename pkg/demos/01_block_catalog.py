"""Tour of the block vocabulary and the capability manifest derived from it.

Run:  python demos/01_block_catalog.py
"""

from storybot.catalog import builtin_catalog, catalog_to_json, render_manifest_text

catalog, manifest = builtin_catalog()

print("=== Block kinds ===")
for kind in catalog:
    params = ", ".join(spec.name for spec in kind.params) or "-"
    print(f"{kind.id:12s} category={kind.category:9s} connects_as={kind.connects_as:9s} params: {params}")

print()
print("=== Capability text (embedded in every model prompt) ===")
print(render_manifest_text(manifest))

print()
print("=== First two records of the catalog JSON the UI drawer consumes ===")
print("\n".join(catalog_to_json(catalog).splitlines()[:40]))
