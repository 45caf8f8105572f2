#include <set>
#include <string>

#include <fmt/format.h>

#include "rwl/lang/program.hpp"

namespace rwl::lang {

namespace {

void collect_unknown(const Expr& e, const ObservationSchema& schema,
                     const std::set<std::string, std::less<>>& declared,
                     std::vector<UnknownName>& out) {
  if (e.kind == ExprKind::Identifier && !declared.contains(e.name) && !schema.contains(e.name)) {
    out.push_back(UnknownName{e.name, e.span});
  }
  for (const auto& child : e.children) collect_unknown(child, schema, declared, out);
}

}  // namespace

std::optional<RewardLangError> validate_program(const RewardProgram& program,
                                                const ObservationSchema& schema) {
  std::set<std::string, std::less<>> declared;
  std::vector<UnknownName> unknowns;
  for (const auto& c : program.components) {
    collect_unknown(c.body, schema, declared, unknowns);
    declared.insert(c.name);
  }
  if (program.total) collect_unknown(program.total->body, schema, declared, unknowns);
  if (unknowns.empty()) return std::nullopt;

  std::set<std::string> all_components;
  for (const auto& c : program.components) all_components.insert(c.name);

  RewardLangError err;
  err.kind = ErrorKind::UnknownIdentifier;
  err.span = unknowns.front().span;
  for (const auto& u : unknowns) {
    if (!err.message.empty()) err.message += '\n';
    if (all_components.contains(u.name)) {
      err.message += fmt::format("unknown identifier '{}' at line {}, column {}: component '{}' is "
                                 "defined later; components may only use earlier components",
                                 u.name, u.span.line, u.span.column, u.name);
    } else {
      err.message += fmt::format("unknown identifier '{}' at line {}, column {}: not an "
                                 "observation channel or earlier component",
                                 u.name, u.span.line, u.span.column);
    }
  }
  err.unknowns = std::move(unknowns);
  return err;
}

}  // namespace rwl::lang
