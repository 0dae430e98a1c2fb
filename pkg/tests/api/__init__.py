# API tests package
