#pragma once

#include <wsc/aco.hpp>
#include <wsc/cluster.hpp>
#include <wsc/error.hpp>
#include <wsc/eval.hpp>
#include <wsc/generator.hpp>
#include <wsc/network.hpp>
#include <wsc/ontology.hpp>
#include <wsc/oracle.hpp>
#include <wsc/registry.hpp>
#include <wsc/request.hpp>
