#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace convexproj {

// Domain failures carry a stable machine-readable code; the CLI maps them to
// exit code 1 with a {code, message} JSON record on stderr.
class DomainError : public std::runtime_error {
 public:
  DomainError(std::string code, const std::string& msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define CONVEXPROJ_ERROR(NAME)                                        \
  class NAME : public DomainError {                                   \
   public:                                                            \
    explicit NAME(const std::string& msg) : DomainError(#NAME, msg) {} \
  }

CONVEXPROJ_ERROR(NotEMatrix);
CONVEXPROJ_ERROR(NoCommonFlag);
CONVEXPROJ_ERROR(NotPointed);
CONVEXPROJ_ERROR(PointNotInterior);
CONVEXPROJ_ERROR(EmptySet);
CONVEXPROJ_ERROR(DegenerateSpan);
CONVEXPROJ_ERROR(NumericalDegeneracy);
CONVEXPROJ_ERROR(NotInterior);
CONVEXPROJ_ERROR(BadKappa);
CONVEXPROJ_ERROR(NonPositiveInput);
CONVEXPROJ_ERROR(FlatFunction);
CONVEXPROJ_ERROR(NoValidAlphaBeta);
CONVEXPROJ_ERROR(NotConvexPatch);
CONVEXPROJ_ERROR(BadParams);
CONVEXPROJ_ERROR(NotVFG);
CONVEXPROJ_ERROR(NotEGroup);
CONVEXPROJ_ERROR(NotLieClosed);
CONVEXPROJ_ERROR(UnknownWeight);
CONVEXPROJ_ERROR(WrongDimension);
CONVEXPROJ_ERROR(NotStrictlyConvex);
CONVEXPROJ_ERROR(FlowlineMisses);

#undef CONVEXPROJ_ERROR

}  // namespace convexproj
