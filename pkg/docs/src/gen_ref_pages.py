"""Generate the code reference pages and navigation."""

from __future__ import annotations

import ast
import importlib.util
from pathlib import Path

import mkdocs_gen_files

MODULE_NAME = "charcycle"
root = Path(__file__).parent.parent.parent
src = root / MODULE_NAME
nav = mkdocs_gen_files.Nav()


def _load_api_labels(src_dir: Path) -> dict[str, str]:
    init_path = src_dir / "__init__.py"
    spec = importlib.util.spec_from_file_location(MODULE_NAME, init_path,
                                                  submodule_search_locations = [str(src_dir)])
    if spec is None or spec.loader is None:
        return {}
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return {str(k): str(v) for k, v in getattr(module, "API_labels", {}).items()}


def _public_members(tree: ast.AST, exported: set[str]) -> list[tuple[str, str]]:
    # (kind, name) for every documented top-level class or function in __all__
    members = []
    for node in getattr(tree, "body", []):
        if not isinstance(node, (ast.ClassDef, ast.FunctionDef)):
            continue
        if node.name in exported and ast.get_docstring(node):
            kind = "class" if isinstance(node, ast.ClassDef) else "function"
            members.append((kind, node.name))
    return sorted(members, key = lambda m: m[1])


def _exported_names(tree: ast.AST) -> set[str]:
    for node in getattr(tree, "body", []):
        if isinstance(node, ast.Assign) and any(getattr(t, "id", None) == "__all__" for t in node.targets):
            return {elt.value for elt in node.value.elts if isinstance(elt, ast.Constant)}
    return set()


api_labels = _load_api_labels(src)

for path in sorted(src.glob("*.py")):
    stem = path.stem
    if stem not in api_labels:
        continue
    tree = ast.parse(path.read_text(encoding = "utf-8"))
    for kind, name in _public_members(tree, _exported_names(tree)):
        doc_path = Path("reference", stem, name).with_suffix(".md")
        nav[(api_labels[stem], name)] = Path(stem, name).with_suffix(".md").as_posix()
        with mkdocs_gen_files.open(doc_path, "w") as fd:
            fd.write(f"::: {MODULE_NAME}.{stem}.{name}\n")
            if kind == "class":
                fd.write("    options:\n      members: true\n")
        mkdocs_gen_files.set_edit_path(doc_path, path.relative_to(root))

with mkdocs_gen_files.open("reference/SUMMARY.md", "w") as nav_file:
    nav_file.writelines(nav.build_literate_nav())
