#pragma once

#include <stdexcept>
#include <string>

namespace bach {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed source text. Positions are 1-based.
class SyntaxError : public Error {
public:
  SyntaxError(int line, int column, const std::string& what)
      : Error("syntax error at " + std::to_string(line) + ":" +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// A model that parsed but violates a static well-formedness rule.
class ValidationError : public Error {
public:
  using Error::Error;
};

class UnknownProcedureError : public ValidationError {
public:
  explicit UnknownProcedureError(const std::string& name)
      : ValidationError("unknown procedure: " + name), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class ArityError : public ValidationError {
public:
  ArityError(const std::string& name, std::size_t expected, std::size_t got)
      : ValidationError("procedure " + name + " expects " +
                        std::to_string(expected) + " argument(s), got " +
                        std::to_string(got)),
        name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class UnguardedRecursionError : public ValidationError {
public:
  explicit UnguardedRecursionError(const std::string& name)
      : ValidationError("unguarded recursion through procedure " + name),
        name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class UnguardedFormulaError : public ValidationError {
public:
  explicit UnguardedFormulaError(const std::string& name)
      : ValidationError("unguarded recursion through formula " + name),
        name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class UnknownFormulaVariableError : public ValidationError {
public:
  explicit UnknownFormulaVariableError(const std::string& name)
      : ValidationError("unknown formula variable: " + name), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class DuplicateDefinitionError : public ValidationError {
public:
  explicit DuplicateDefinitionError(const std::string& name)
      : ValidationError("duplicate definition: " + name), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class UnboundVariableError : public ValidationError {
public:
  explicit UnboundVariableError(const std::string& name)
      : ValidationError("unbound variable: " + name), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

}  // namespace bach
