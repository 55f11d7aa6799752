#include "chordc/errors.hpp"

#include <utility>

namespace chordc {

namespace {

std::string join_lines(const std::vector<std::string>& items)
{
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) out += "; ";
        out += item;
    }
    return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t line, std::size_t column, const std::string& what)
    : Error("SyntaxError at line " + std::to_string(line) + ", column " + std::to_string(column) +
            ": " + what),
      line_(line),
      column_(column)
{
}

SchemaError::SchemaError(std::string path, const std::string& what)
    : Error("SchemaError at " + path + ": " + what), path_(std::move(path))
{
}

UnknownRole::UnknownRole(std::string role)
    : Error("UnknownRole: \"" + role + "\" is not declared in roles"), role_(std::move(role))
{
}

UnstructuredGraph::UnstructuredGraph(std::vector<std::string> node_ids, const std::string& what)
    : Error("Unstructured(" + join_lines(node_ids) + "): " + what), node_ids_(std::move(node_ids))
{
}

UnsupportedConstruct::UnsupportedConstruct(std::string construct, std::string path)
    : Error("UnsupportedConstruct: " + construct + " at " + path),
      construct_(std::move(construct)),
      path_(std::move(path))
{
}

InvalidModel::InvalidModel(std::vector<std::string> problems)
    : Error("InvalidModel: " + join_lines(problems)), problems_(std::move(problems))
{
}

TooLarge::TooLarge(std::string what, std::size_t cap)
    : Error("TooLarge: " + what + " exceeded cap of " + std::to_string(cap)), cap_(cap)
{
}

}  // namespace chordc
