#include "stepgraph/graph/graphml.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "stepgraph/error.hpp"

namespace stepgraph::graph {

namespace {

// ---- attrs codec -----------------------------------------------------------
// Each attribute value is percent-encoded so that arbitrary bytes survive
// XML transport, then values are joined with '|'.

bool attr_safe(unsigned char c) {
  if (c < 0x20 || c > 0x7E) return false;
  switch (c) {
    case '%':
    case '|':
    case '&':
    case '<':
    case '>':
    case '"':
      return false;
    default:
      return true;
  }
}

std::string encode_attrs(const std::vector<std::string>& attrs) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) out.push_back('|');
    for (unsigned char c : attrs[i]) {
      if (attr_safe(c)) {
        out.push_back(static_cast<char>(c));
      } else {
        out.push_back('%');
        out.push_back(hex[c >> 4]);
        out.push_back(hex[c & 0xF]);
      }
    }
  }
  return out;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::vector<std::string> decode_attrs(const std::string& text) {
  std::vector<std::string> attrs(1);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '|') {
      attrs.emplace_back();
    } else if (c == '%') {
      if (i + 2 >= text.size())
        throw Error(ErrorCode::MalformedGraphml, "truncated %-escape in attrs");
      const int hi = hex_value(text[i + 1]);
      const int lo = hex_value(text[i + 2]);
      if (hi < 0 || lo < 0)
        throw Error(ErrorCode::MalformedGraphml, "bad %-escape in attrs");
      attrs.back().push_back(static_cast<char>((hi << 4) | lo));
      i += 2;
    } else {
      attrs.back().push_back(c);
    }
  }
  return attrs;
}

// ---- XML writing -----------------------------------------------------------

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// ---- minimal XML reading ---------------------------------------------------
// Handles exactly the subset the exporter emits: declaration, elements with
// attributes, nested elements, character data, the five named entities and
// numeric character references.

struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::vector<XmlElement> children;
  std::string text;

  const XmlElement* child(const std::string& tag) const {
    for (const XmlElement& c : children)
      if (c.name == tag) return &c;
    return nullptr;
  }
  std::string attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : it->second;
  }
};

class XmlReader {
 public:
  explicit XmlReader(const std::string& text) : text_(text) {}

  XmlElement parse_document() {
    skip_prolog();
    XmlElement root = parse_element();
    skip_space_and_comments();
    if (i_ != text_.size())
      throw Error(ErrorCode::MalformedGraphml, "content after root element");
    return root;
  }

 private:
  const std::string& text_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedGraphml, what);
  }

  char peek() const { return i_ < text_.size() ? text_[i_] : '\0'; }
  bool starts_with(const char* s) const {
    return text_.compare(i_, std::char_traits<char>::length(s), s) == 0;
  }

  void skip_space() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_])))
      ++i_;
  }

  void skip_space_and_comments() {
    for (;;) {
      skip_space();
      if (starts_with("<!--")) {
        const std::size_t end = text_.find("-->", i_ + 4);
        if (end == std::string::npos) fail("unterminated comment");
        i_ = end + 3;
      } else {
        return;
      }
    }
  }

  void skip_prolog() {
    skip_space();
    if (starts_with("<?")) {
      const std::size_t end = text_.find("?>", i_);
      if (end == std::string::npos) fail("unterminated XML declaration");
      i_ = end + 2;
    }
    skip_space_and_comments();
  }

  std::string parse_name() {
    const std::size_t start = i_;
    while (i_ < text_.size()) {
      const char c = text_[i_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
          c == '.' || c == ':') {
        ++i_;
      } else {
        break;
      }
    }
    if (i_ == start) fail("expected a name");
    return text_.substr(start, i_ - start);
  }

  std::string unescape(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (raw[k] != '&') {
        out.push_back(raw[k]);
        continue;
      }
      const std::size_t semi = raw.find(';', k);
      if (semi == std::string::npos) fail("unterminated entity");
      const std::string entity = raw.substr(k + 1, semi - k - 1);
      if (entity == "amp") out.push_back('&');
      else if (entity == "lt") out.push_back('<');
      else if (entity == "gt") out.push_back('>');
      else if (entity == "quot") out.push_back('"');
      else if (entity == "apos") out.push_back('\'');
      else if (!entity.empty() && entity[0] == '#') {
        int value = 0;
        if (entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X')) {
          for (std::size_t j = 2; j < entity.size(); ++j) {
            const int h = hex_value(entity[j]);
            if (h < 0) fail("bad character reference");
            value = value * 16 + h;
          }
        } else {
          for (std::size_t j = 1; j < entity.size(); ++j) {
            if (!std::isdigit(static_cast<unsigned char>(entity[j])))
              fail("bad character reference");
            value = value * 10 + (entity[j] - '0');
          }
        }
        if (value <= 0 || value > 255) fail("character reference out of range");
        out.push_back(static_cast<char>(value));
      } else {
        fail("unknown entity '&" + entity + ";'");
      }
      k = semi;
    }
    return out;
  }

  XmlElement parse_element() {
    if (peek() != '<') fail("expected '<'");
    ++i_;
    XmlElement element;
    element.name = parse_name();
    for (;;) {
      skip_space();
      const char c = peek();
      if (c == '/') {
        if (!starts_with("/>")) fail("expected '/>'");
        i_ += 2;
        return element;
      }
      if (c == '>') {
        ++i_;
        parse_content(element);
        return element;
      }
      const std::string key = parse_name();
      skip_space();
      if (peek() != '=') fail("expected '=' in attribute");
      ++i_;
      skip_space();
      const char quote = peek();
      if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
      ++i_;
      const std::size_t end = text_.find(quote, i_);
      if (end == std::string::npos) fail("unterminated attribute value");
      element.attrs[key] = unescape(text_.substr(i_, end - i_));
      i_ = end + 1;
    }
  }

  void parse_content(XmlElement& element) {
    std::string text;
    for (;;) {
      if (i_ >= text_.size()) fail("unterminated element <" + element.name + ">");
      if (peek() == '<') {
        if (starts_with("<!--")) {
          const std::size_t end = text_.find("-->", i_ + 4);
          if (end == std::string::npos) fail("unterminated comment");
          i_ = end + 3;
          continue;
        }
        if (starts_with("</")) {
          i_ += 2;
          const std::string name = parse_name();
          if (name != element.name)
            fail("mismatched </" + name + "> closing <" + element.name + ">");
          skip_space();
          if (peek() != '>') fail("expected '>'");
          ++i_;
          element.text = unescape(text);
          return;
        }
        element.children.push_back(parse_element());
      } else {
        text.push_back(text_[i_]);
        ++i_;
      }
    }
  }
};

constexpr const char* kKeyInstanceId = "d0";
constexpr const char* kKeyType = "d1";
constexpr const char* kKeyAttrs = "d2";
constexpr const char* kKeyLabel = "d3";
constexpr const char* kKeySourcePath = "d4";

long long parse_ll(const std::string& text, const char* what) {
  try {
    std::size_t used = 0;
    const long long value = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(what);
    return value;
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedGraphml,
                std::string("bad integer for ") + what + ": '" + text + "'");
  }
}

}  // namespace

void export_graphml(const CadGraph& graph, std::ostream& out) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  out << "  <key id=\"" << kKeyInstanceId
      << "\" for=\"node\" attr.name=\"instance_id\" attr.type=\"int\"/>\n";
  out << "  <key id=\"" << kKeyType
      << "\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n";
  out << "  <key id=\"" << kKeyAttrs
      << "\" for=\"node\" attr.name=\"attrs\" attr.type=\"string\"/>\n";
  out << "  <key id=\"" << kKeyLabel
      << "\" for=\"graph\" attr.name=\"label\" attr.type=\"int\"/>\n";
  out << "  <key id=\"" << kKeySourcePath
      << "\" for=\"graph\" attr.name=\"source_path\" attr.type=\"string\"/>\n";
  out << "  <graph id=\"G\" edgedefault=\"directed\">\n";
  if (graph.label)
    out << "    <data key=\"" << kKeyLabel << "\">" << *graph.label
        << "</data>\n";
  if (!graph.source_path.empty())
    out << "    <data key=\"" << kKeySourcePath << "\">"
        << xml_escape(graph.source_path) << "</data>\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& node = graph.nodes[i];
    out << "    <node id=\"n" << i << "\">\n";
    out << "      <data key=\"" << kKeyInstanceId << "\">" << node.instance_id
        << "</data>\n";
    out << "      <data key=\"" << kKeyType << "\">"
        << xml_escape(node.type_token) << "</data>\n";
    if (!node.attrs.empty())
      out << "      <data key=\"" << kKeyAttrs << "\">"
          << encode_attrs(node.attrs) << "</data>\n";
    out << "    </node>\n";
  }
  for (const auto& [src, dst] : graph.edges)
    out << "    <edge source=\"n" << src << "\" target=\"n" << dst << "\"/>\n";
  out << "  </graph>\n";
  out << "</graphml>\n";
}

void export_graphml(const CadGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  export_graphml(graph, out);
}

std::string graphml_string(const CadGraph& graph) {
  std::ostringstream out;
  export_graphml(graph, out);
  return out.str();
}

CadGraph import_graphml_string(const std::string& text) {
  XmlReader reader(text);
  const XmlElement root = reader.parse_document();
  if (root.name != "graphml")
    throw Error(ErrorCode::MalformedGraphml, "root element is not <graphml>");
  const XmlElement* g = root.child("graph");
  if (!g) throw Error(ErrorCode::MalformedGraphml, "missing <graph>");

  CadGraph graph;
  std::map<std::string, int> node_index;
  for (const XmlElement& child : g->children) {
    if (child.name == "data") {
      const std::string key = child.attr("key");
      if (key == kKeyLabel)
        graph.label = static_cast<int>(parse_ll(child.text, "label"));
      else if (key == kKeySourcePath)
        graph.source_path = child.text;
    } else if (child.name == "node") {
      const std::string id = child.attr("id");
      if (id.empty() || node_index.count(id))
        throw Error(ErrorCode::MalformedGraphml, "bad node id '" + id + "'");
      GraphNode node;
      bool saw_instance = false;
      for (const XmlElement& data : child.children) {
        if (data.name != "data") continue;
        const std::string key = data.attr("key");
        if (key == kKeyInstanceId) {
          node.instance_id = parse_ll(data.text, "instance_id");
          saw_instance = true;
        } else if (key == kKeyType) {
          node.type_token = data.text;
        } else if (key == kKeyAttrs) {
          node.attrs = decode_attrs(data.text);
        }
      }
      if (!saw_instance || node.type_token.empty())
        throw Error(ErrorCode::MalformedGraphml,
                    "node '" + id + "' lacks instance_id or type");
      node_index.emplace(id, static_cast<int>(graph.nodes.size()));
      graph.nodes.push_back(std::move(node));
    } else if (child.name == "edge") {
      const auto src = node_index.find(child.attr("source"));
      const auto dst = node_index.find(child.attr("target"));
      if (src == node_index.end() || dst == node_index.end())
        throw Error(ErrorCode::MalformedGraphml, "edge endpoint unknown");
      graph.edges.emplace_back(src->second, dst->second);
    }
  }
  return graph;
}

CadGraph import_graphml(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  return import_graphml_string(buf.str());
}

CadGraph import_graphml_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return import_graphml(in);
}

}  // namespace stepgraph::graph
