import re
from pathlib import Path
from typing import Any, Callable, Dict, Final, Optional, Union

import jinja2 as j2
from pydantic import BaseModel, PrivateAttr

TEMPLATE_DIR: Final[Path] = Path(__file__).resolve().parent.parent / "assets" / "templates"

BLANK_LINE: Final[re.Pattern] = re.compile(r"^\s+$\n", flags=re.MULTILINE)
LINE_BREAKS: Final[re.Pattern] = re.compile(r"\n\n+")


def _strip_blank_lines(text: str) -> str:
    return BLANK_LINE.sub("\n", text)


def _squeeze_breaks(text: str, replacement: str = "\n\n") -> str:
    return LINE_BREAKS.sub(replacement, text)


# 0: raw, 1: empty out space-only lines, 2: squeeze runs of line breaks, 3: 1 then 2, 4: 1 then drop blank lines
FORMATTERS: Final[Dict[int, Callable[[str], str]]] = {
    0: lambda text: text,
    1: _strip_blank_lines,
    2: _squeeze_breaks,
    3: lambda text: _squeeze_breaks(_strip_blank_lines(text)),
    4: lambda text: _squeeze_breaks(_strip_blank_lines(text), "\n"),
}


class ReportRender(BaseModel):
    """Plain-text report from a Jinja2 template, compiled once at construction."""

    __template: Optional[j2.Template] = PrivateAttr(default=None)
    __render_content: Optional[str] = PrivateAttr(default=None)
    __error_message: Optional[str] = PrivateAttr(default=None)

    def __init__(self: "ReportRender", template: Union[str, Path]) -> None:
        super().__init__()

        template_path = Path(template)
        if not template_path.is_absolute() and not template_path.exists():
            template_path = TEMPLATE_DIR / template_path

        # reports are plain text, nothing is rendered as HTML
        env = j2.Environment(  # noqa: S701
            loader=j2.FileSystemLoader(template_path.parent),
            undefined=j2.StrictUndefined,
            autoescape=False,
            trim_blocks=True,
            lstrip_blocks=True,
            keep_trailing_newline=True,
        )

        try:
            self.__template = env.get_template(template_path.name)
        except j2.TemplateNotFound as e:
            self.__error_message = f"template '{e.name}' not found in '{template_path.parent}'"
        except (OSError, UnicodeDecodeError, j2.TemplateSyntaxError) as e:
            self.__error_message = str(e)

    @property
    def is_valid_template(self: "ReportRender") -> bool:
        return self.__template is not None

    def apply_context(self: "ReportRender", context: Dict[str, Any], format_type: int = 3) -> bool:
        if self.__template is None:
            return False

        try:
            raw_render_content = self.__template.render(context)
        except (TypeError, ValueError, j2.UndefinedError, j2.TemplateError) as e:
            self.__error_message = str(e)
            return False

        formatter = FORMATTERS.get(format_type)
        if formatter is None:
            self.__error_message = "Unsupported format type"
            return False

        self.__render_content = formatter(raw_render_content)
        return True

    @property
    def render_content(self: "ReportRender") -> Optional[str]:
        return self.__render_content

    @property
    def error_message(self: "ReportRender") -> Optional[str]:
        return self.__error_message
