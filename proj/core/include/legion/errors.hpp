//
// Copyright 2026 The Legion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LEGION_ERRORS_HPP_
#define LEGION_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace legion {

// Base class for all protocol and contract violations raised by this library.
// Callers that only care about "legion failed" can catch this; tests catch the
// concrete types.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define LEGION_DEFINE_ERROR(NAME)                                  \
  class NAME : public Error {                                      \
   public:                                                         \
    explicit NAME(const std::string& what = #NAME) : Error(what) {} \
  }

// cti
LEGION_DEFINE_ERROR(InvalidRecord);
LEGION_DEFINE_ERROR(PolicyMismatch);
LEGION_DEFINE_ERROR(InternalNotSharable);
LEGION_DEFINE_ERROR(ExportUnsanitized);

// ledger / merkle
LEGION_DEFINE_ERROR(EmptyInput);
LEGION_DEFINE_ERROR(IndexOutOfRange);
LEGION_DEFINE_ERROR(UnknownTarget);
LEGION_DEFINE_ERROR(ParseError);

// privacy accounting
LEGION_DEFINE_ERROR(NonFiniteInput);
LEGION_DEFINE_ERROR(InvalidParams);
LEGION_DEFINE_ERROR(DivergentBound);
LEGION_DEFINE_ERROR(Unachievable);

// secure aggregation
LEGION_DEFINE_ERROR(Overflow);
LEGION_DEFINE_ERROR(RosterIncomplete);

// fl
LEGION_DEFINE_ERROR(DimensionMismatch);
LEGION_DEFINE_ERROR(EmptyData);

// exposure proofs
LEGION_DEFINE_ERROR(DuplicateItem);
LEGION_DEFINE_ERROR(SaltCountMismatch);
LEGION_DEFINE_ERROR(ItemAbsent);

// netsim / federation
LEGION_DEFINE_ERROR(UnknownNode);
LEGION_DEFINE_ERROR(RoleViolation);
LEGION_DEFINE_ERROR(ConfigInvalid);

#undef LEGION_DEFINE_ERROR

}  // namespace legion

#endif  // LEGION_ERRORS_HPP_
