// Copyright 2026 The sgmnmf Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SGMNMF_ERROR_H_
#define SGMNMF_ERROR_H_

#include <stdexcept>
#include <string>

namespace sgmnmf {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SGMNMF_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

SGMNMF_DEFINE_ERROR(SingularMatrix);
SGMNMF_DEFINE_ERROR(DimensionMismatch);
SGMNMF_DEFINE_ERROR(NonFinite);
SGMNMF_DEFINE_ERROR(InvalidAuxiliary);
SGMNMF_DEFINE_ERROR(InvalidArgument);
SGMNMF_DEFINE_ERROR(EmptyInput);
SGMNMF_DEFINE_ERROR(ShapeMismatch);
SGMNMF_DEFINE_ERROR(UnsupportedFormat);
SGMNMF_DEFINE_ERROR(CorruptHeader);
SGMNMF_DEFINE_ERROR(IoFailure);
SGMNMF_DEFINE_ERROR(ConfigError);
SGMNMF_DEFINE_ERROR(ZeroReference);
SGMNMF_DEFINE_ERROR(TooManySources);

#undef SGMNMF_DEFINE_ERROR

}  // namespace sgmnmf

#endif  // SGMNMF_ERROR_H_
