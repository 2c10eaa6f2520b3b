#pragma once

#include <string>
#include <string_view>

namespace wikiclean::io {

/// Best-effort removal of wikitext markup: templates, tables, refs, HTML
/// tags and comments, file/category links, emphasis quotes and heading
/// markers. Link targets are replaced by their labels. Not a renderer.
std::string strip_wikitext(std::string_view wikitext);

}  // namespace wikiclean::io
