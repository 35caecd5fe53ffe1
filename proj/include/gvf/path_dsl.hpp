// Building path specs from DSL expression text, and the on-disk path file
// format.
//
// Path files are UTF-8 text:
//   - '#' starts a comment, blank lines are ignored;
//   - an optional first content line `params: name=value name=value ...`
//     binds parameters;
//   - every following line is one expression.  One expression over (x, y)
//     defines an implicit path; two or three expressions over w define a
//     parametric one.
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gvf/expr.hpp"
#include "gvf/path.hpp"

namespace gvf {

// Compile a level-set expression over (x, y) into an implicit path.  The
// parameter map is folded into the AST, so evaluation sees only x and y.
// The Hessian is symmetric by construction: its off-diagonal entry is the one
// mixed derivative, stored twice.
inline ImplicitPathSpec compile_implicit_path(const std::string& phi_src,
                                              const Bindings& params) {
  std::vector<std::string> param_names;
  for (const auto& [name, value] : params) param_names.push_back(name);
  ExprAst ast = bind_parameters(parse_expression(phi_src, {"x", "y"}, param_names), params);
  return {[ast](Vec2 p) {
    const Bindings at{{"x", p.x}, {"y", p.y}};
    const Dual2 xx = eval_second_order(ast, at, "x", "x");
    const Dual2 yy = eval_second_order(ast, at, "y", "y");
    const Dual2 xy = eval_second_order(ast, at, "x", "y");
    ImplicitSample s;
    s.value = xx.value;
    s.grad = {xx.d1, yy.d1};
    s.hess = {xx.d12, xy.d12, xy.d12, yy.d12};
    return s;
  }};
}

// Compile 2 or 3 coordinate expressions over w into a parametric path.
inline ParametricPathSpec compile_parametric_path(const std::vector<std::string>& f_srcs,
                                                  const Bindings& params) {
  if (f_srcs.size() != 2 && f_srcs.size() != 3)
    throw ValidationError("parametric path needs 2 or 3 coordinate expressions, got " +
                          std::to_string(f_srcs.size()));
  std::vector<std::string> param_names;
  for (const auto& [name, value] : params) param_names.push_back(name);
  std::vector<ExprAst> asts;
  for (const auto& src : f_srcs)
    asts.push_back(bind_parameters(parse_expression(src, {"w"}, param_names), params));
  const int dims = static_cast<int>(f_srcs.size());
  return {dims, [asts, dims](double w) {
            const Bindings at{{"w", w}};
            ParametricSample s;
            double* pos[] = {&s.pos.x, &s.pos.y, &s.pos.z};
            double* vel[] = {&s.vel.x, &s.vel.y, &s.vel.z};
            double* acc[] = {&s.acc.x, &s.acc.y, &s.acc.z};
            for (int i = 0; i < dims; ++i) {
              const Dual2 d = eval_second_order(asts[i], at, "w", "w");
              *pos[i] = d.value;
              *vel[i] = d.d1;
              *acc[i] = d.d12;
            }
            return s;
          }};
}

// Parsed contents of a path file, before compilation.
struct PathFile {
  Bindings params;
  std::vector<std::string> expressions;
};

inline PathFile parse_path_file_text(const std::string& text, const std::string& origin) {
  PathFile out;
  std::istringstream stream(text);
  std::string line;
  bool saw_expression = false;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    if (line.rfind("params:", 0) == 0) {
      if (saw_expression || !out.params.empty())
        throw ValidationError(origin + ":" + std::to_string(line_no) +
                              ": params line must be the first content line");
      std::istringstream pairs(line.substr(7));
      std::string pair;
      while (pairs >> pair) {
        const std::size_t eq = pair.find('=');
        if (eq == std::string::npos || eq == 0)
          throw ValidationError(origin + ":" + std::to_string(line_no) +
                                ": expected name=value, got '" + pair + "'");
        char* endp = nullptr;
        const std::string value_text = pair.substr(eq + 1);
        const double value = std::strtod(value_text.c_str(), &endp);
        if (endp != value_text.c_str() + value_text.size() || value_text.empty())
          throw ValidationError(origin + ":" + std::to_string(line_no) +
                                ": malformed value in '" + pair + "'");
        out.params[pair.substr(0, eq)] = value;
      }
      continue;
    }
    out.expressions.push_back(line);
    saw_expression = true;
  }
  if (out.expressions.empty())
    throw ValidationError(origin + ": no expressions found");
  if (out.expressions.size() > 3)
    throw ValidationError(origin + ": too many expression lines (" +
                          std::to_string(out.expressions.size()) + "), expected 1-3");
  return out;
}

using PathSpec = std::variant<ImplicitPathSpec, ParametricPathSpec>;

inline PathSpec compile_path_file(const PathFile& file) {
  if (file.expressions.size() == 1)
    return compile_implicit_path(file.expressions[0], file.params);
  return compile_parametric_path(file.expressions, file.params);
}

inline PathSpec load_path_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ValidationError("cannot open path file '" + filename + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return compile_path_file(parse_path_file_text(text.str(), filename));
}

}  // namespace gvf
