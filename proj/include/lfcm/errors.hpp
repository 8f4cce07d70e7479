#ifndef LFCM_ERRORS_HPP
#define LFCM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace lfcm {

// Base of everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: malformed data, out-of-range indices, inconsistent shapes.
class InputError : public Error {
public:
    using Error::Error;
};

// A statistical precondition of a test does not hold for the data at hand.
class StatisticalError : public Error {
public:
    using Error::Error;
};

class InvalidData : public InputError { public: using InputError::InputError; };
class IndexError : public InputError { public: using InputError::InputError; };
class ShapeError : public InputError { public: using InputError::InputError; };
class InvalidTetrad : public InputError { public: using InputError::InputError; };
class InvalidGraph : public InputError { public: using InputError::InputError; };
class DomainMismatch : public InputError { public: using InputError::InputError; };
class GraphTooLarge : public InputError { public: using InputError::InputError; };
class ParseError : public InputError { public: using InputError::InputError; };
class IoError : public InputError { public: using InputError::InputError; };

class InsufficientSamples : public StatisticalError { public: using StatisticalError::StatisticalError; };
class SingularMatrix : public StatisticalError { public: using StatisticalError::StatisticalError; };
class DegenerateVariance : public StatisticalError { public: using StatisticalError::StatisticalError; };
class EmptyHypothesis : public StatisticalError { public: using StatisticalError::StatisticalError; };
class TooFewVariables : public StatisticalError { public: using StatisticalError::StatisticalError; };
class DegenerateCalibration : public StatisticalError { public: using StatisticalError::StatisticalError; };

}  // namespace lfcm

#endif  // LFCM_ERRORS_HPP
