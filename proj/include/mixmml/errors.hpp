#pragma once

#include <stdexcept>
#include <string>

namespace mixmml {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Structural problem in an input dataset. Indices are 0-based, -1 when
// the error is not tied to a particular cell.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, long observation = -1, long variable = -1)
        : Error(what), observation(observation), variable(variable) {}
    long observation;
    long variable;
};

// Some observation has zero density under every mixture component.
class DegenerateLikelihoodError : public Error {
public:
    DegenerateLikelihoodError(const std::string& what, long observation)
        : Error(what), observation(observation) {}
    long observation;
};

// A component received zero responsibility mass in a classical M-step.
class EmptyComponentError : public Error {
public:
    EmptyComponentError(const std::string& what, long component)
        : Error(what), component(component) {}
    long component;
};

// The penalized weight update annihilated more components than allowed.
class AnnihilationError : public Error {
public:
    explicit AnnihilationError(const std::string& what) : Error(what) {}
};

// Separation is undefined (K=1) or infinite (zero vs non-zero support).
class SeparationError : public Error {
public:
    explicit SeparationError(const std::string& what) : Error(what) {}
};

// Rejection sampling could not reach the requested separation interval.
class GenerationError : public Error {
public:
    GenerationError(const std::string& what, double achieved_lo, double achieved_hi)
        : Error(what), achieved_lo(achieved_lo), achieved_hi(achieved_hi) {}
    double achieved_lo;
    double achieved_hi;
};

// Contingency table with fewer than two non-empty rows or columns.
class AssociationError : public Error {
public:
    explicit AssociationError(const std::string& what) : Error(what) {}
};

// Malformed input file. line/column are 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line = 0, long column = 0)
        : Error(what), line(line), column(column) {}
    long line;
    long column;
};

// Model file written by an incompatible schema version.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

}  // namespace mixmml
