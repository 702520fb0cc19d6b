#ifndef GLYPHREC_ERRORS_HPP
#define GLYPHREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace glyphrec {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define GLYPHREC_DEFINE_ERROR(Name)                                   \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg) : Error(msg) {}         \
    }

GLYPHREC_DEFINE_ERROR(EmptyImage);
GLYPHREC_DEFINE_ERROR(DimensionMismatch);
GLYPHREC_DEFINE_ERROR(EmptyDataset);
GLYPHREC_DEFINE_ERROR(SingleClassData);
GLYPHREC_DEFINE_ERROR(NonPositiveC);
GLYPHREC_DEFINE_ERROR(EmptyGrid);
GLYPHREC_DEFINE_ERROR(AllZeroAccuracies);
GLYPHREC_DEFINE_ERROR(NoSamples);
GLYPHREC_DEFINE_ERROR(BadLabel);
GLYPHREC_DEFINE_ERROR(UnreadableImage);
GLYPHREC_DEFINE_ERROR(ClassTooSmall);
GLYPHREC_DEFINE_ERROR(ConfigInvalid);
GLYPHREC_DEFINE_ERROR(InvalidArgument);
GLYPHREC_DEFINE_ERROR(IoError);
GLYPHREC_DEFINE_ERROR(FormatError);

#undef GLYPHREC_DEFINE_ERROR

}  // namespace glyphrec

#endif  // GLYPHREC_ERRORS_HPP
