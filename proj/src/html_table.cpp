#include "electmap/diagnostics.hpp"
#include "electmap/error.hpp"
#include "electmap/ingest.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

namespace electmap {

namespace {

struct Attribute {
  std::string name;
  std::string value;
};

enum class TokenType { StartTag, EndTag, Text };

struct Token {
  TokenType type = TokenType::Text;
  std::string name; // lower-cased tag name
  std::vector<Attribute> attributes;
  std::string_view text;
};

bool is_name_char(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '_' || c == ':';
}

bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

struct NamedEntity {
  std::string_view name;
  std::uint32_t code_point;
};

constexpr std::array<NamedEntity, 30> kEntities{{
    {"amp", '&'},      {"lt", '<'},       {"gt", '>'},       {"quot", '"'},
    {"apos", '\''},    {"nbsp", 0xA0},    {"eacute", 0xE9},  {"Eacute", 0xC9},
    {"egrave", 0xE8},  {"Egrave", 0xC8},  {"ecirc", 0xEA},   {"euml", 0xEB},
    {"agrave", 0xE0},  {"Agrave", 0xC0},  {"acirc", 0xE2},   {"ccedil", 0xE7},
    {"Ccedil", 0xC7},  {"icirc", 0xEE},   {"iuml", 0xEF},    {"ocirc", 0xF4},
    {"ugrave", 0xF9},  {"ucirc", 0xFB},   {"uuml", 0xFC},    {"ndash", 0x2013},
    {"mdash", 0x2014}, {"rsquo", 0x2019}, {"lsquo", 0x2018}, {"ldquo", 0x201C},
    {"rdquo", 0x201D}, {"hellip", 0x2026},
}};

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '&') {
      out.push_back(s[i++]);
      continue;
    }
    const auto semi = s.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back(s[i++]);
      continue;
    }
    const auto body = s.substr(i + 1, semi - i - 1);
    bool decoded = false;
    if (body.size() >= 2 && body[0] == '#') {
      std::uint32_t cp = 0;
      bool ok = true;
      const bool hex = body[1] == 'x' || body[1] == 'X';
      const auto digits = body.substr(hex ? 2 : 1);
      if (digits.empty() || digits.size() > 7) ok = false;
      for (char c : digits) {
        if (!ok) break;
        int d = -1;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
        if (d < 0) ok = false;
        else cp = cp * (hex ? 16u : 10u) + static_cast<std::uint32_t>(d);
      }
      if (ok) {
        append_utf8(out, cp);
        decoded = true;
      }
    } else {
      for (const auto& e : kEntities) {
        if (e.name == body) {
          append_utf8(out, e.code_point);
          decoded = true;
          break;
        }
      }
    }
    if (decoded) {
      i = semi + 1;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

bool is_raw_text_element(std::string_view name) {
  return name == "script" || name == "style" || name == "textarea" || name == "title";
}

class Tokenizer {
public:
  explicit Tokenizer(std::string_view doc) : doc_(doc) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < doc_.size()) {
      const auto lt = doc_.find('<', pos_);
      if (lt == std::string_view::npos) {
        emit_text(tokens, doc_.substr(pos_));
        break;
      }
      if (lt > pos_) emit_text(tokens, doc_.substr(pos_, lt - pos_));
      pos_ = lt;
      const auto rest = doc_.substr(pos_);
      if (rest.starts_with("<!--")) {
        const auto end = doc_.find("-->", pos_ + 4);
        if (end == std::string_view::npos)
          throw Error(Errc::MalformedDocument, "unterminated comment");
        pos_ = end + 3;
      } else if (rest.starts_with("<!") || rest.starts_with("<?")) {
        const auto end = doc_.find('>', pos_);
        if (end == std::string_view::npos)
          throw Error(Errc::MalformedDocument, "unterminated declaration");
        pos_ = end + 1;
      } else if (rest.size() >= 2 && rest[1] == '/' ) {
        if (rest.size() >= 3 && is_alpha(rest[2])) {
          read_end_tag(tokens);
        } else {
          // "</>" or "</ " is noise
          const auto end = doc_.find('>', pos_);
          pos_ = end == std::string_view::npos ? doc_.size() : end + 1;
        }
      } else if (rest.size() >= 2 && is_alpha(rest[1])) {
        read_start_tag(tokens);
      } else {
        emit_text(tokens, doc_.substr(pos_, 1));
        ++pos_;
      }
    }
    return tokens;
  }

private:
  void emit_text(std::vector<Token>& tokens, std::string_view text) {
    Token t;
    t.type = TokenType::Text;
    t.text = text;
    tokens.push_back(std::move(t));
  }

  std::string read_name() {
    std::string name;
    while (pos_ < doc_.size() && is_name_char(doc_[pos_])) name.push_back(doc_[pos_++]);
    return text::to_lower(name);
  }

  void skip_space() {
    while (pos_ < doc_.size() && text::is_space(doc_[pos_])) ++pos_;
  }

  void read_end_tag(std::vector<Token>& tokens) {
    pos_ += 2;
    Token t;
    t.type = TokenType::EndTag;
    t.name = read_name();
    const auto end = doc_.find('>', pos_);
    if (end == std::string_view::npos)
      throw Error(Errc::MalformedDocument, "unterminated end tag </" + t.name);
    pos_ = end + 1;
    tokens.push_back(std::move(t));
  }

  void read_start_tag(std::vector<Token>& tokens) {
    ++pos_;
    Token t;
    t.type = TokenType::StartTag;
    t.name = read_name();
    while (true) {
      skip_space();
      if (pos_ >= doc_.size())
        throw Error(Errc::MalformedDocument, "unterminated tag <" + t.name);
      const char c = doc_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        ++pos_;
        continue;
      }
      Attribute attr;
      while (pos_ < doc_.size() && !text::is_space(doc_[pos_]) && doc_[pos_] != '=' &&
             doc_[pos_] != '>' && doc_[pos_] != '/')
        attr.name.push_back(doc_[pos_++]);
      if (attr.name.empty()) {
        // stray '=' or similar; skip it
        ++pos_;
        continue;
      }
      attr.name = text::to_lower(attr.name);
      skip_space();
      if (pos_ < doc_.size() && doc_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < doc_.size() && (doc_[pos_] == '"' || doc_[pos_] == '\'')) {
          const char quote = doc_[pos_++];
          const auto end = doc_.find(quote, pos_);
          if (end == std::string_view::npos)
            throw Error(Errc::MalformedDocument, "unterminated attribute in <" + t.name);
          attr.value = decode_entities(doc_.substr(pos_, end - pos_));
          pos_ = end + 1;
        } else {
          std::string value;
          while (pos_ < doc_.size() && !text::is_space(doc_[pos_]) && doc_[pos_] != '>')
            value.push_back(doc_[pos_++]);
          attr.value = decode_entities(value);
        }
      }
      t.attributes.push_back(std::move(attr));
    }
    const std::string name = t.name;
    tokens.push_back(std::move(t));
    if (is_raw_text_element(name)) {
      // Skip to the matching close tag, case-insensitively.
      const std::string lowered = text::to_lower(doc_.substr(pos_));
      const auto end = lowered.find("</" + name);
      if (end == std::string::npos) {
        pos_ = doc_.size();
        return;
      }
      pos_ += end;
    }
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
};

const std::string* attribute(const Token& t, std::string_view name) {
  for (const auto& a : t.attributes)
    if (a.name == name) return &a.value;
  return nullptr;
}

bool has_class(const Token& t, std::string_view cls) {
  const auto* value = attribute(t, "class");
  if (!value) return false;
  for (auto part : text::split(*value, ' '))
    if (text::trim(part) == cls) return true;
  return false;
}

bool matches(const Token& t, const TableSelector& sel) {
  if (t.type != TokenType::StartTag) return false;
  if (!text::iequals(t.name, sel.element.empty() ? "table" : sel.element)) return false;
  if (!sel.id.empty()) {
    const auto* id = attribute(t, "id");
    if (!id || *id != sel.id) return false;
  }
  if (!sel.class_name.empty() && !has_class(t, sel.class_name)) return false;
  return true;
}

struct ParsedRow {
  std::vector<std::string> cells;
  bool any_th = false;
  bool in_thead = false;
};

std::string_view kind_label(TableKind kind) { return to_string(kind); }

} // namespace

RawTable parse_results_table(std::string_view document, TableKind kind,
                             const TableSelector& selector) {
  if (document.find('\0') != std::string_view::npos)
    throw Error(Errc::MalformedDocument, "document contains NUL bytes");
  const std::string utf8 = text::to_utf8(document);
  const auto tokens = Tokenizer(utf8).run();

  // Locate the selected element, then the first table at or after it.
  std::size_t i = 0;
  while (i < tokens.size() && !matches(tokens[i], selector)) ++i;
  if (i == tokens.size())
    throw Error(Errc::NoTableFound, "no <" + selector.element + "> matching selector for " +
                                        std::string(kind_label(kind)));
  while (i < tokens.size() && !(tokens[i].type == TokenType::StartTag && tokens[i].name == "table"))
    ++i;
  if (i == tokens.size())
    throw Error(Errc::NoTableFound, "selected element holds no table");

  std::vector<ParsedRow> rows;
  int depth = 0;
  bool in_thead = false;
  bool row_open = false;
  bool cell_open = false;
  std::string cell_text;
  std::size_t cell_span = 1;

  auto close_cell = [&] {
    if (!cell_open) return;
    rows.back().cells.push_back(text::collapse_whitespace(decode_entities(cell_text)));
    for (std::size_t k = 1; k < cell_span; ++k) rows.back().cells.emplace_back();
    cell_open = false;
    cell_text.clear();
  };
  auto close_row = [&] {
    close_cell();
    row_open = false;
  };
  auto open_row = [&] {
    close_row();
    rows.emplace_back();
    rows.back().in_thead = in_thead;
    row_open = true;
  };

  for (; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    if (t.type == TokenType::Text) {
      if (cell_open) cell_text.append(t.text);
      continue;
    }
    if (t.name == "table") {
      if (t.type == TokenType::StartTag) {
        ++depth;
      } else {
        --depth;
        if (depth == 0) break;
      }
      continue;
    }
    if (depth != 1) {
      if (cell_open && t.type == TokenType::StartTag && t.name == "br") cell_text.push_back(' ');
      continue;
    }
    if (t.type == TokenType::StartTag) {
      if (t.name == "thead") {
        close_row();
        in_thead = true;
      } else if (t.name == "tbody" || t.name == "tfoot") {
        close_row();
        in_thead = false;
      } else if (t.name == "tr") {
        open_row();
      } else if (t.name == "td" || t.name == "th") {
        if (!row_open) open_row();
        close_cell();
        cell_open = true;
        cell_span = 1;
        if (const auto* span = attribute(t, "colspan")) {
          if (auto n = text::parse_int(*span); n && *n > 1) cell_span = static_cast<std::size_t>(std::min<std::int64_t>(*n, 1000));
        }
        if (t.name == "th") rows.back().any_th = true;
      } else if (t.name == "br" && cell_open) {
        cell_text.push_back(' ');
      }
    } else {
      if (t.name == "td" || t.name == "th") {
        close_cell();
      } else if (t.name == "tr") {
        close_row();
      } else if (t.name == "thead") {
        close_row();
        in_thead = false;
      } else if (t.name == "tbody" || t.name == "tfoot") {
        close_row();
      }
    }
  }
  close_row();

  std::erase_if(rows, [](const ParsedRow& r) { return r.cells.empty(); });

  RawTable table;
  table.kind = kind;
  if (rows.empty()) return table;

  std::size_t header_index = 0;
  bool thead_found = false;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].in_thead) {
      header_index = r;
      thead_found = true;
    }
  }
  table.header = rows[header_index].cells;
  const std::size_t width = table.header.size();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r == header_index || (thead_found && rows[r].in_thead)) continue;
    auto cells = std::move(rows[r].cells);
    if (cells.size() < width) {
      warn("table row " + std::to_string(table.rows.size()) + " has " +
           std::to_string(cells.size()) + " cells, padded to " + std::to_string(width));
      cells.resize(width);
    } else if (cells.size() > width) {
      warn("table row " + std::to_string(table.rows.size()) + " has " +
           std::to_string(cells.size()) + " cells, truncated to " + std::to_string(width));
      cells.resize(width);
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

} // namespace electmap
