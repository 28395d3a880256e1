#include "stepgraph/step/parser.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "stepgraph/step/lexer.hpp"

namespace stepgraph::step {

namespace {

const std::string kIsoKeyword = "ISO-10303-21";
const std::string kEndIsoKeyword = "END-ISO-10303-21";

bool is_entity_name(const std::string& name) {
  if (name.empty()) return false;
  if (!((name[0] >= 'A' && name[0] <= 'Z') || name[0] == '_')) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  StepFile run() {
    expect_keyword(kIsoKeyword, ErrorCode::MissingIsoHeader);
    expect(TokenKind::Semicolon, ErrorCode::MissingIsoHeader);

    StepFile file;
    bool saw_data = false;
    while (!at_end()) {
      const Token& tok = current();
      if (tok.kind != TokenKind::Keyword)
        throw malformed(0, "expected a section keyword");
      if (tok.text == "HEADER") {
        next();
        expect(TokenKind::Semicolon, ErrorCode::MalformedInstance);
        parse_header(file);
      } else if (tok.text == "DATA") {
        next();
        if (current().kind == TokenKind::LParen) skip_balanced_parens();
        expect(TokenKind::Semicolon, ErrorCode::MalformedInstance);
        parse_data(file);
        saw_data = true;
      } else if (tok.text == kEndIsoKeyword) {
        next();
        expect(TokenKind::Semicolon, ErrorCode::MalformedInstance);
        break;
      } else {
        throw malformed(0, "unexpected section '" + tok.text + "'");
      }
    }
    if (!saw_data)
      throw Error(ErrorCode::MissingDataSection, "file has no DATA section");
    if (!at_end()) throw malformed(0, "content after END-ISO-10303-21");
    return file;
  }

 private:
  const std::vector<Token>& tokens_;
  std::size_t i_ = 0;

  static const Token& eof_token() {
    static const Token tok{TokenKind::EndOfInput, "", 0.0, 0, SourcePos{}};
    return tok;
  }

  const Token& current() const {
    return i_ < tokens_.size() ? tokens_[i_] : eof_token();
  }
  bool at_end() const { return i_ >= tokens_.size(); }
  const Token& next() {
    const Token& tok = current();
    if (i_ < tokens_.size()) ++i_;
    return tok;
  }

  Error malformed(long long id, const std::string& what) const {
    Error err(ErrorCode::MalformedInstance, what, current().pos);
    err.instance_id = id;
    return err;
  }

  void expect(TokenKind kind, ErrorCode code) {
    if (current().kind != kind)
      throw Error(code, std::string("expected ") + token_kind_name(kind),
                  current().pos);
    next();
  }

  void expect_keyword(const std::string& text, ErrorCode code) {
    if (current().kind != TokenKind::Keyword || current().text != text)
      throw Error(code, "expected '" + text + ";'", current().pos);
    next();
  }

  void skip_balanced_parens() {
    int depth = 0;
    do {
      const Token& tok = next();
      if (tok.kind == TokenKind::LParen) ++depth;
      if (tok.kind == TokenKind::RParen) --depth;
      if (tok.kind == TokenKind::EndOfInput)
        throw malformed(0, "unbalanced parentheses");
    } while (depth > 0);
  }

  void parse_header(StepFile& file) {
    while (true) {
      const Token& tok = current();
      if (tok.kind != TokenKind::Keyword)
        throw malformed(0, "expected header record name");
      if (tok.text == "ENDSEC") {
        next();
        expect(TokenKind::Semicolon, ErrorCode::MalformedInstance);
        return;
      }
      HeaderRecord record;
      record.name = next().text;
      expect(TokenKind::LParen, ErrorCode::MalformedInstance);
      record.args = parse_args(0);
      expect(TokenKind::RParen, ErrorCode::MalformedInstance);
      expect(TokenKind::Semicolon, ErrorCode::MalformedInstance);
      if (record.name == "FILE_SCHEMA") file.schema_name = schema_of(record);
      file.header.push_back(std::move(record));
    }
  }

  // FILE_SCHEMA((' schema ', ...)) -> first string found.
  static std::string schema_of(const HeaderRecord& record) {
    for (const Argument& arg : record.args) {
      if (arg.is<TextArg>()) return arg.as<TextArg>().value;
      if (arg.is<ListArg>())
        for (const Argument& item : arg.as<ListArg>().items)
          if (item.is<TextArg>()) return item.as<TextArg>().value;
    }
    return {};
  }

  void parse_data(StepFile& file) {
    while (true) {
      const Token& tok = current();
      if (tok.kind == TokenKind::Keyword && tok.text == "ENDSEC") {
        next();
        expect(TokenKind::Semicolon, ErrorCode::MalformedInstance);
        return;
      }
      if (tok.kind != TokenKind::Reference)
        throw malformed(0, "expected '#id=' instance");
      file.instances.push_back(parse_instance());
      const EntityInstance& inst = file.instances.back();
      auto [it, inserted] =
          file.id_index.emplace(inst.id, file.instances.size() - 1);
      if (!inserted) {
        Error err(ErrorCode::DuplicateInstanceId,
                  "instance #" + std::to_string(inst.id) + " redefined",
                  tok.pos);
        err.instance_id = inst.id;
        throw err;
      }
    }
  }

  EntityInstance parse_instance() {
    EntityInstance inst;
    inst.id = next().id;
    if (inst.id <= 0) throw malformed(inst.id, "instance id must be positive");
    if (current().kind != TokenKind::Equals)
      throw malformed(inst.id, "expected '=' after instance id");
    next();

    if (current().kind == TokenKind::LParen) {
      // complex instance: #n=(A(...)B(...));
      next();
      while (current().kind == TokenKind::Keyword) {
        parse_simple_record(inst);
      }
      if (current().kind != TokenKind::RParen || inst.types.empty())
        throw malformed(inst.id, "malformed complex instance");
      next();
    } else if (current().kind == TokenKind::Keyword) {
      parse_simple_record(inst);
    } else {
      throw malformed(inst.id, "expected entity type name");
    }
    if (current().kind != TokenKind::Semicolon)
      throw malformed(inst.id, "expected ';' after instance");
    next();
    return inst;
  }

  void parse_simple_record(EntityInstance& inst) {
    const Token& name = next();
    if (!is_entity_name(name.text))
      throw malformed(inst.id, "invalid entity name '" + name.text + "'");
    if (current().kind != TokenKind::LParen)
      throw malformed(inst.id, "expected '(' after entity name");
    next();
    ArgumentList args = parse_args(inst.id);
    if (current().kind != TokenKind::RParen)
      throw malformed(inst.id, "expected ')' after arguments");
    next();
    inst.types.push_back(name.text);
    inst.args.push_back(std::move(args));
  }

  ArgumentList parse_args(long long id) {
    ArgumentList args;
    if (current().kind == TokenKind::RParen) return args;  // empty list
    args.push_back(parse_arg(id));
    while (current().kind == TokenKind::Comma) {
      next();
      args.push_back(parse_arg(id));
    }
    return args;
  }

  Argument parse_arg(long long id) {
    const Token& tok = current();
    switch (tok.kind) {
      case TokenKind::Integer:
      case TokenKind::Real: {
        next();
        return make_number(tok.text, tok.number);
      }
      case TokenKind::String:
        next();
        return make_text(tok.text);
      case TokenKind::EnumValue:
        next();
        return make_enum(tok.text);
      case TokenKind::Reference: {
        next();
        if (tok.id <= 0) throw malformed(id, "reference target must be positive");
        return make_reference(tok.id);
      }
      case TokenKind::Dollar:
        next();
        return make_unset();
      case TokenKind::Star:
        next();
        return make_inherited();
      case TokenKind::LParen: {
        next();
        ArgumentList items = parse_args(id);
        if (current().kind != TokenKind::RParen)
          throw malformed(id, "expected ')' closing list");
        next();
        return make_list(std::move(items));
      }
      case TokenKind::Keyword: {
        // typed wrapper: NAME(value)
        const std::string type_name = next().text;
        if (current().kind != TokenKind::LParen)
          throw malformed(id, "expected '(' after type '" + type_name + "'");
        next();
        Argument inner = parse_arg(id);
        if (current().kind != TokenKind::RParen)
          throw malformed(id, "expected ')' after typed value");
        next();
        return make_typed(type_name, std::move(inner));
      }
      default:
        throw malformed(id, "unexpected token in argument position");
    }
  }
};

void write_arg(std::ostream& out, const Argument& arg);

void write_args(std::ostream& out, const ArgumentList& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out << ',';
    write_arg(out, args[i]);
  }
}

void write_arg(std::ostream& out, const Argument& arg) {
  if (arg.is<NumberArg>()) {
    out << arg.as<NumberArg>().text;
  } else if (arg.is<TextArg>()) {
    out << '\'';
    for (char c : arg.as<TextArg>().value) {
      out << c;
      if (c == '\'') out << '\'';
    }
    out << '\'';
  } else if (arg.is<EnumArg>()) {
    out << arg.as<EnumArg>().name;
  } else if (arg.is<ReferenceArg>()) {
    out << '#' << arg.as<ReferenceArg>().target;
  } else if (arg.is<UnsetArg>()) {
    out << '$';
  } else if (arg.is<InheritedArg>()) {
    out << '*';
  } else if (arg.is<ListArg>()) {
    out << '(';
    write_args(out, arg.as<ListArg>().items);
    out << ')';
  } else {
    const TypedArg& typed = arg.as<TypedArg>();
    out << typed.type_name << '(';
    write_arg(out, typed.inner.front());
    out << ')';
  }
}

void walk_arg(const Argument& arg, std::string& path,
              const std::function<void(long long, const std::string&)>& fn) {
  if (arg.is<ReferenceArg>()) {
    fn(arg.as<ReferenceArg>().target, path);
  } else if (arg.is<ListArg>()) {
    const ArgumentList& items = arg.as<ListArg>().items;
    const std::size_t mark = path.size();
    for (std::size_t i = 0; i < items.size(); ++i) {
      path += "." + std::to_string(i);
      walk_arg(items[i], path, fn);
      path.resize(mark);
    }
  } else if (arg.is<TypedArg>()) {
    const std::size_t mark = path.size();
    path += ".0";
    walk_arg(arg.as<TypedArg>().inner.front(), path, fn);
    path.resize(mark);
  }
}

}  // namespace

StepFile parse_file(const std::vector<Token>& tokens) {
  return Parser(tokens).run();
}

StepFile parse_text(std::string_view text) { return parse_file(tokenize(text)); }

StepFile parse_path(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

void for_each_reference(
    const EntityInstance& instance,
    const std::function<void(long long, const std::string&)>& fn) {
  for (std::size_t t = 0; t < instance.args.size(); ++t) {
    for (std::size_t a = 0; a < instance.args[t].size(); ++a) {
      std::string path = instance.is_complex()
                             ? std::to_string(t) + ":" + std::to_string(a)
                             : std::to_string(a);
      walk_arg(instance.args[t][a], path, fn);
    }
  }
}

std::vector<DanglingReference> validate_references(const StepFile& file) {
  std::vector<DanglingReference> dangling;
  // instances scanned in ascending id order so reports are deterministic
  std::vector<const EntityInstance*> by_id;
  by_id.reserve(file.instances.size());
  for (const EntityInstance& inst : file.instances) by_id.push_back(&inst);
  std::sort(by_id.begin(), by_id.end(),
            [](const EntityInstance* a, const EntityInstance* b) {
              return a->id < b->id;
            });
  for (const EntityInstance* inst : by_id) {
    for_each_reference(*inst,
                       [&](long long target, const std::string& path) {
                         if (!file.find(target))
                           dangling.push_back({inst->id, target, path});
                       });
  }
  return dangling;
}

std::string write_text(const StepFile& file) {
  std::ostringstream out;
  out << "ISO-10303-21;\n";
  out << "HEADER;\n";
  for (const HeaderRecord& record : file.header) {
    out << record.name << '(';
    write_args(out, record.args);
    out << ");\n";
  }
  out << "ENDSEC;\n";
  out << "DATA;\n";
  for (const EntityInstance& inst : file.instances) {
    out << '#' << inst.id << '=';
    if (inst.is_complex()) {
      out << '(';
      for (std::size_t t = 0; t < inst.types.size(); ++t) {
        out << inst.types[t] << '(';
        write_args(out, inst.args[t]);
        out << ')';
      }
      out << ')';
    } else {
      out << inst.types.front() << '(';
      write_args(out, inst.args.front());
      out << ')';
    }
    out << ";\n";
  }
  out << "ENDSEC;\n";
  out << "END-ISO-10303-21;\n";
  return out.str();
}

}  // namespace stepgraph::step
