// S-expression form of SdfScene:
//
//   (ball cx cy cz r)
//   (box cx cy cz hx hy hz)
//   (torus cx cy cz ax ay az ring tube)
//   (cylinder cx cy cz ax ay az radius half-height)
//   (union s...) (intersection s...) (subtract base cut)
//   (translate dx dy dz s) (rotate m00 m01 m02 m10 m11 m12 m20 m21 m22 s) (scale f s)

#include <cctype>
#include <charconv>
#include <string>
#include <system_error>

#include "topoforge/error.hpp"
#include "topoforge/field.hpp"
#include "topoforge/text.hpp"

namespace topoforge {

namespace sd = scene_detail;

namespace {

void put(std::string& out, double v) {
  out.push_back(' ');
  out += format_double(v);
}

void put(std::string& out, Vec3 v) {
  put(out, v.x);
  put(out, v.y);
  put(out, v.z);
}

void print_node(const sd::Node& node, std::string& out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, sd::Ball>) {
          out += "(ball";
          put(out, s.center);
          put(out, s.radius);
        } else if constexpr (std::is_same_v<T, sd::Box>) {
          out += "(box";
          put(out, s.center);
          put(out, s.half);
        } else if constexpr (std::is_same_v<T, sd::Torus>) {
          out += "(torus";
          put(out, s.center);
          put(out, s.axis);
          put(out, s.ring);
          put(out, s.tube);
        } else if constexpr (std::is_same_v<T, sd::Cylinder>) {
          out += "(cylinder";
          put(out, s.center);
          put(out, s.axis);
          put(out, s.radius);
          put(out, s.half_height);
        } else if constexpr (std::is_same_v<T, sd::Union> || std::is_same_v<T, sd::Intersection>) {
          out += std::is_same_v<T, sd::Union> ? "(union" : "(intersection";
          for (const auto& c : s.children) {
            out.push_back(' ');
            print_node(*c, out);
          }
        } else if constexpr (std::is_same_v<T, sd::Subtraction>) {
          out += "(subtract ";
          print_node(*s.base, out);
          out.push_back(' ');
          print_node(*s.cut, out);
        } else if constexpr (std::is_same_v<T, sd::Translate>) {
          out += "(translate";
          put(out, s.offset);
          out.push_back(' ');
          print_node(*s.child, out);
        } else if constexpr (std::is_same_v<T, sd::Rotate>) {
          out += "(rotate";
          for (double v : s.rotation.m) put(out, v);
          out.push_back(' ');
          print_node(*s.child, out);
        } else {
          out += "(scale";
          put(out, s.factor);
          out.push_back(' ');
          print_node(*s.child, out);
        }
      },
      node.shape);
  out.push_back(')');
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SdfScene parse_all() {
    SdfScene s = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error("scene parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool peek_close() {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == ')';
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view atom() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')')
      ++pos_;
    if (start == pos_) fail("expected a token");
    return text_.substr(start, pos_ - start);
  }

  double number() {
    const std::string_view tok = atom();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      fail("expected a number, got '" + std::string(tok) + "'");
    return v;
  }

  Vec3 vec() {
    const double x = number();
    const double y = number();
    const double z = number();
    return {x, y, z};
  }

  SdfScene parse_expr() {
    expect('(');
    const std::string head(atom());
    SdfScene out = dispatch(head);
    expect(')');
    return out;
  }

  std::vector<SdfScene> operands() {
    std::vector<SdfScene> parts;
    while (!peek_close()) parts.push_back(parse_expr());
    return parts;
  }

  SdfScene dispatch(const std::string& head) {
    if (head == "ball") {
      const Vec3 c = vec();
      return SdfScene::ball(c, number());
    }
    if (head == "box") {
      const Vec3 c = vec();
      return SdfScene::box(c, vec());
    }
    if (head == "torus" || head == "cylinder") {
      const Vec3 c = vec();
      const Vec3 a = vec();
      const double r1 = number();
      const double r2 = number();
      return head == "torus" ? SdfScene::torus(c, a, r1, r2) : SdfScene::cylinder(c, a, r1, r2);
    }
    if (head == "union") return SdfScene::unite(operands());
    if (head == "intersection") return SdfScene::intersect(operands());
    if (head == "subtract") {
      SdfScene base = parse_expr();
      return SdfScene::subtract(std::move(base), parse_expr());
    }
    if (head == "translate") {
      const Vec3 t = vec();
      return SdfScene::translate(parse_expr(), t);
    }
    if (head == "rotate") {
      Mat3 m;
      for (double& v : m.m) v = number();
      return SdfScene::rotate(parse_expr(), m);
    }
    if (head == "scale") {
      const double f = number();
      return SdfScene::scale(parse_expr(), f);
    }
    fail("unknown scene node '" + head + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SdfScene::to_string() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

SdfScene SdfScene::parse(std::string_view text) { return Parser(text).parse_all(); }

}  // namespace topoforge
