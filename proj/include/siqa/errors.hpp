#pragma once

#include <stdexcept>
#include <string>

namespace siqa {

// Base class for every error raised by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SIQA_ERROR(Name)      \
  class Name : public Error { \
   public:                    \
    using Error::Error;       \
  }

// raster / io
SIQA_ERROR(UnsupportedFormat);
SIQA_ERROR(CorruptData);
SIQA_ERROR(WrongChannelCount);
SIQA_ERROR(IoFailure);

// fov
SIQA_ERROR(NoFovFound);

// saliency
SIQA_ERROR(EmptyFov);
SIQA_ERROR(NegativeInput);
SIQA_ERROR(StageMismatch);

// dataset
SIQA_ERROR(MalformedRow);
SIQA_ERROR(DuplicatePath);
SIQA_ERROR(MissingMask);
SIQA_ERROR(DimensionMismatch);
SIQA_ERROR(CorruptStack);

// nn
SIQA_ERROR(ShapeMismatch);
SIQA_ERROR(OddDimension);
SIQA_ERROR(EmptyDataset);
SIQA_ERROR(DivergedLoss);

// eval
SIQA_ERROR(LengthMismatch);
SIQA_ERROR(EmptyInput);
SIQA_ERROR(EmptyMatrix);
SIQA_ERROR(EmptyClass);

#undef SIQA_ERROR

}  // namespace siqa
