#pragma once

// Benchmark functions and the Bellman-Ford cost injector.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lmcma {

enum class FunctionId { Sphere, Rastrigin, Rosenbrock, Ellipsoid };

/// Case-insensitive; throws ContractError on unknown names.
FunctionId parse_function(std::string_view name);
std::string_view function_name(FunctionId id);

double sphere(std::span<const double> x);
double rastrigin(std::span<const double> x);
double rosenbrock(std::span<const double> x);
/// Sum of squared prefix sums, O(n).
double ellipsoid(std::span<const double> x);

double evaluate(FunctionId id, std::span<const double> x);

/// Vertex counts accepted for cost injection; 0 disables it.
inline constexpr std::size_t kComplexityLevels[] = {0, 200, 400, 600};
inline constexpr std::size_t kComplexityEdges = 10'000;

bool is_valid_complexity(std::size_t vertices);

struct ObjectiveSpec {
    FunctionId function = FunctionId::Sphere;
    std::size_t n = 2;
    std::size_t complexity = 0;
    std::uint64_t graph_seed = 0;

    void validate() const;
};

struct Edge {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct ComplexityGraph {
    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
};

/// kComplexityEdges edges with uniform endpoints (self-loops allowed) and
/// uniform weights in [0, 1); a pure function of its arguments.
ComplexityGraph make_graph(std::size_t vertex_count, std::uint64_t graph_seed,
                           std::size_t edge_count = kComplexityEdges);

/// Single-source distances after exactly vertex_count - 1 full relaxation
/// rounds. Unreachable vertices stay at +infinity.
std::vector<double> bellman_ford(const ComplexityGraph& graph, std::size_t source);

/// Must be safe to call concurrently.
using Objective = std::function<double(std::span<const double>)>;

/// Adds a Bellman-Ford pass from vertex 0 to every call of `f` when `graph`
/// is set. The returned value is bit-identical to f(x).
Objective wrap_with_complexity(Objective f, std::shared_ptr<const ComplexityGraph> graph);

/// Plain function plus the injector requested by `spec`; the graph is built
/// once and shared by all callers.
Objective make_objective(const ObjectiveSpec& spec);

}  // namespace lmcma
