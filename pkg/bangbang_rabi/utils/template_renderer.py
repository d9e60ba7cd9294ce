"""Jinja rendering of the plain-text run summaries."""

from pathlib import Path
from typing import Any

from jinja2 import Environment, FileSystemLoader, StrictUndefined, Template, TemplateNotFound

from bangbang_rabi.utils.records import RunRecord

SUMMARY_TEMPLATE = "run-summary"


class TemplateRenderer:
    """Loads ``*.jinja`` templates from the package's templates folder."""

    def __init__(self, templates_dir: str | Path | None = None):
        """Initialize the renderer.

        Args:
            templates_dir: Directory holding the templates. If None, uses the ``templates``
                folder shipped with the package.
        """
        if templates_dir is None:
            templates_dir = Path(__file__).parent.parent / "templates"

        self.templates_dir = Path(templates_dir)
        if not self.templates_dir.exists():
            raise FileNotFoundError(f"Templates directory not found: {self.templates_dir}")

        self.env = Environment(
            loader=FileSystemLoader(str(self.templates_dir)),
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            undefined=StrictUndefined,
            keep_trailing_newline=True,
        )
        self._template_cache: dict[str, Template] = {}

    def get_template_names(self) -> list[str]:
        return sorted(path.stem for path in self.templates_dir.glob("*.jinja"))

    def get_template(self, template_name: str) -> Template:
        """Get a template by name (without the .jinja extension).

        Raises:
            TemplateNotFound: If the template doesn't exist.
        """
        if template_name not in self._template_cache:
            try:
                self._template_cache[template_name] = self.env.get_template(
                    f"{template_name}.jinja"
                )
            except TemplateNotFound:
                raise TemplateNotFound(
                    f"Template '{template_name}' not found in {self.templates_dir}"
                )
        return self._template_cache[template_name]

    def render(self, template_name: str, **variables: Any) -> str:
        return str(self.get_template(template_name).render(**variables))

    def render_summary(self, record: RunRecord) -> str:
        """Human-readable summary of one run record."""
        return self.render(SUMMARY_TEMPLATE, record=record.to_dict())


def render_summary(record: RunRecord) -> str:
    return TemplateRenderer().render_summary(record)
