#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace chordc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed JSON text. Line and column are 1-based.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed JSON that does not match a document schema.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& what);
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class UnknownRole : public Error {
public:
    explicit UnknownRole(std::string role);
    const std::string& role() const noexcept { return role_; }

private:
    std::string role_;
};

/// Activity graph with no structured decomposition.
class UnstructuredGraph : public Error {
public:
    UnstructuredGraph(std::vector<std::string> node_ids, const std::string& what);
    const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }

private:
    std::vector<std::string> node_ids_;
};

/// Parallel and loop terms have role sets but no derivation rules.
class UnsupportedConstruct : public Error {
public:
    UnsupportedConstruct(std::string construct, std::string path);
    const std::string& construct() const noexcept { return construct_; }
    const std::string& path() const noexcept { return path_; }

private:
    std::string construct_;
    std::string path_;
};

class InvalidModel : public Error {
public:
    InvalidModel(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Enumeration exceeded its configured cap.
class TooLarge : public Error {
public:
    TooLarge(std::string what, std::size_t cap);
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

}  // namespace chordc
