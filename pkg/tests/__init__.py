"""Test package for HomeyPro MCP Server."""